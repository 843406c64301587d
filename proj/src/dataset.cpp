#include "mlad/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "mlad/error.hpp"
#include "mlad/rng.hpp"

namespace mlad {

std::vector<LogRecord> make_records(const std::vector<long>& keys_per_line,
                                    const std::vector<int>& labels_per_line) {
    if (keys_per_line.size() != labels_per_line.size())
        throw DataError("label/keys misalignment: " + std::to_string(keys_per_line.size()) +
                        " keys vs " + std::to_string(labels_per_line.size()) + " labels");
    std::vector<LogRecord> out;
    out.reserve(keys_per_line.size());
    for (std::size_t i = 0; i < keys_per_line.size(); ++i) {
        if (keys_per_line[i] < 0) continue; // skipped line
        LogRecord r;
        r.index = static_cast<long>(i);
        r.template_key = keys_per_line[i];
        r.label = labels_per_line[i] ? 1 : 0;
        out.push_back(std::move(r));
    }
    return out;
}

SessionizeResult sessionize(const std::vector<LogRecord>& records,
                            const std::vector<std::string>& raw_lines,
                            const std::string& id_pattern) {
    const std::regex re(id_pattern);
    SessionizeResult result;
    for (const auto& rec : records) {
        if (rec.index < 0 || static_cast<std::size_t>(rec.index) >= raw_lines.size())
            throw DataError("record index " + std::to_string(rec.index) +
                            " outside corpus of " + std::to_string(raw_lines.size()) + " lines");
        std::smatch m;
        if (std::regex_search(raw_lines[static_cast<std::size_t>(rec.index)], m, re)) {
            LogRecord r = rec;
            r.session_id = m.str(0);
            result.records.push_back(std::move(r));
        } else {
            ++result.dropped;
        }
    }
    if (result.records.empty())
        throw DataError("session id pattern '" + id_pattern + "' matched zero lines");
    return result;
}

void apply_session_labels(std::vector<LogRecord>& records,
                          const std::vector<std::pair<std::string, int>>& session_labels) {
    std::map<std::string, int> by_id(session_labels.begin(), session_labels.end());
    for (auto& rec : records) {
        auto it = by_id.find(rec.session_id);
        if (it == by_id.end())
            throw DataError("no label for session '" + rec.session_id + "'");
        rec.label = it->second;
    }
}

namespace {

Window make_window(const std::vector<LogRecord>& records, std::size_t begin, std::size_t end,
                   const std::string& origin, const std::string& session_id, int max_len) {
    Window w;
    w.origin = origin;
    w.session_id = session_id;
    const std::size_t stop = std::min(end, begin + static_cast<std::size_t>(max_len));
    w.keys.reserve(stop - begin);
    for (std::size_t i = begin; i < end; ++i) {
        if (i < stop) w.keys.push_back(records[i].template_key);
        // Labels come from the full membership, including truncated tails.
        if (records[i].label) w.label = 1;
    }
    return w;
}

} // namespace

std::vector<Window> windowize(const std::vector<LogRecord>& records, const SplitSpec& spec,
                              const std::string& origin) {
    std::vector<Window> out;
    if (records.empty()) return out;

    if (spec.mode == WindowMode::Sliding) {
        if (spec.window_size < 2) throw DataError("sliding window size must be >= 2");
        for (const auto& r : records) {
            if (!r.session_id.empty())
                throw ContractError("sliding windowing expects records without session ids");
        }
        const std::size_t w = static_cast<std::size_t>(spec.window_size);
        for (std::size_t start = 0; start < records.size(); start += w) {
            const std::size_t end = std::min(start + w, records.size());
            if (end - start < 2) break; // trailing remainder of length < 2 dropped
            out.push_back(make_window(records, start, end, origin, "", spec.window_size));
        }
        return out;
    }

    // Session mode: one window per session, in order of first appearance.
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& sid = records[i].session_id;
        if (sid.empty()) throw ContractError("session windowing requires session ids");
        auto [it, fresh] = groups.try_emplace(sid);
        if (fresh) order.push_back(sid);
        it->second.push_back(i);
    }
    for (const auto& sid : order) {
        const auto& idx = groups[sid];
        if (idx.size() < 2) continue; // cannot form a valid window
        Window w;
        w.origin = origin;
        w.session_id = sid;
        const std::size_t cap = static_cast<std::size_t>(spec.max_session_len);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (i < cap) w.keys.push_back(records[idx[i]].template_key);
            if (records[idx[i]].label) w.label = 1;
        }
        out.push_back(std::move(w));
    }
    return out;
}

Split split(const std::vector<Window>& windows, std::uint64_t seed) {
    std::vector<std::size_t> normal;
    std::vector<std::size_t> anomalous;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        (windows[i].label ? anomalous : normal).push_back(i);
    }
    if (normal.size() < anomalous.size())
        throw DataError("split needs at least as many normal windows as anomalous (" +
                        std::to_string(normal.size()) + " normal vs " +
                        std::to_string(anomalous.size()) + " anomalous)");

    Rng rng(seed);
    rng.shuffle(normal);
    Split s;
    for (std::size_t i = 0; i < anomalous.size(); ++i) {
        s.test.push_back(windows[anomalous[i]]);
        s.test.push_back(windows[normal[i]]);
    }
    for (std::size_t i = anomalous.size(); i < normal.size(); ++i) {
        s.train.push_back(windows[normal[i]]);
    }
    return s;
}

PreparedDataset fuse(const std::vector<PreparedDataset>& parts, std::uint64_t seed) {
    PreparedDataset out;
    std::ostringstream name;
    std::set<std::pair<std::string, long>> seen;
    for (std::size_t pi = 0; pi < parts.size(); ++pi) {
        const auto& part = parts[pi];
        if (pi) name << "+";
        name << part.name;
        // Keys are namespaced per origin: each (origin, key) pair gets a
        // fresh key in the merged store. Shared semantics across systems are
        // recovered in embedding space, not by key identity.
        std::map<long, long> remap;
        for (long key : part.store.keys()) {
            if (!seen.insert({part.name, key}).second)
                throw ContractError("fuse: duplicate key " + std::to_string(key) +
                                    " in origin '" + part.name + "'");
            const Template& t = part.store.by_key(key);
            const long fresh = out.store.add(t.tokens);
            out.store.by_key(fresh).support_count = t.support_count;
            remap[key] = fresh;
        }
        for (const auto& w : part.windows) {
            Window nw = w;
            for (auto& k : nw.keys) {
                auto it = remap.find(k);
                if (it == remap.end())
                    throw DataError("fuse: window key " + std::to_string(k) +
                                    " missing from store of origin '" + part.name + "'");
                k = it->second;
            }
            out.windows.push_back(std::move(nw));
        }
    }
    out.name = name.str();
    Rng rng(seed);
    rng.shuffle(out.windows);
    return out;
}

void save_windows(const std::vector<Window>& windows, std::ostream& os) {
    os << "#mlad-windows 1\n";
    for (const auto& w : windows) {
        os << w.origin << '\t' << w.label << '\t';
        for (std::size_t i = 0; i < w.keys.size(); ++i) {
            if (i) os << ',';
            os << w.keys[i];
        }
        if (!w.session_id.empty()) os << '\t' << w.session_id;
        os << '\n';
    }
}

void save_windows_file(const std::vector<Window>& windows, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open " + path + " for writing");
    save_windows(windows, os);
}

std::vector<Window> load_windows(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header != "#mlad-windows 1")
        throw DataError("bad windows file header: '" + header + "'");
    std::vector<Window> out;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (true) {
            const auto tab = line.find('\t', pos);
            fields.push_back(line.substr(pos, tab == std::string::npos ? tab : tab - pos));
            if (tab == std::string::npos) break;
            pos = tab + 1;
        }
        if (fields.size() < 3)
            throw DataError("malformed window at line " + std::to_string(lineno));
        Window w;
        w.origin = fields[0];
        w.label = std::stoi(fields[1]) ? 1 : 0;
        std::istringstream ks(fields[2]);
        std::string tok;
        while (std::getline(ks, tok, ',')) w.keys.push_back(std::stol(tok));
        if (fields.size() > 3) w.session_id = fields[3];
        if (w.keys.size() < 2)
            throw DataError("window shorter than 2 keys at line " + std::to_string(lineno));
        out.push_back(std::move(w));
    }
    return out;
}

std::vector<Window> load_windows_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open windows file " + path);
    return load_windows(is);
}

std::vector<int> load_labels_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open labels file " + path);
    std::vector<int> out;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line != "0" && line != "1")
            throw DataError("labels file " + path + ": expected 0 or 1 at line " +
                            std::to_string(out.size() + 1) + ", got '" + line + "'");
        out.push_back(line == "1" ? 1 : 0);
    }
    return out;
}

std::vector<std::pair<std::string, int>> load_session_labels_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open labels csv " + path);
    std::vector<std::pair<std::string, int>> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw DataError("labels csv " + path + ": missing comma at line " +
                            std::to_string(lineno));
        std::string id = line.substr(0, comma);
        std::string raw = line.substr(comma + 1);
        int label;
        if (raw == "0" || raw == "Normal" || raw == "normal") {
            label = 0;
        } else if (raw == "1" || raw == "Anomaly" || raw == "anomaly") {
            label = 1;
        } else if (lineno == 1) {
            continue; // header row
        } else {
            throw DataError("labels csv " + path + ": bad label '" + raw + "' at line " +
                            std::to_string(lineno));
        }
        out.emplace_back(std::move(id), label);
    }
    if (out.empty()) throw DataError("labels csv " + path + " has no entries");
    return out;
}

} // namespace mlad
