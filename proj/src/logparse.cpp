#include "mlad/logparse.hpp"

#include <fstream>
#include <sstream>

#include "mlad/error.hpp"

namespace mlad {

std::vector<Mask> default_masks() {
    return {
        {"block_id", R"(blk_-?[0-9]+)"},
        {"ipv4", R"((\d{1,3}\.){3}\d{1,3}(:\d+)?)"},
        {"hex", R"(\b0[xX][0-9a-fA-F]+\b)"},
        {"path", R"((?:/[A-Za-z0-9._\-]+){2,}/?)"},
        {"integer", R"(\b\d+\b)"},
    };
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(std::move(tok));
    return out;
}

} // namespace

std::vector<std::string> preprocess(const std::string& line, const DrainConfig& cfg) {
    std::string s = line;
    if (!cfg.strip_prefix.empty()) {
        const std::regex prefix_re("^(?:" + cfg.strip_prefix + ")");
        s = std::regex_replace(s, prefix_re, "", std::regex_constants::format_first_only);
    }
    for (const auto& m : cfg.masks) {
        const std::regex re(m.pattern);
        s = std::regex_replace(s, re, m.placeholder);
    }
    return split_ws(s);
}

long TemplateStore::add(std::vector<std::string> tokens) {
    const long key = next_key_++;
    by_key_[key] = Template{key, std::move(tokens), 1};
    return key;
}

Template& TemplateStore::by_key(long key) {
    auto it = by_key_.find(key);
    if (it == by_key_.end())
        throw DataError("template key " + std::to_string(key) + " not in store");
    return it->second;
}

const Template& TemplateStore::by_key(long key) const {
    auto it = by_key_.find(key);
    if (it == by_key_.end())
        throw DataError("template key " + std::to_string(key) + " not in store");
    return it->second;
}

std::vector<long> TemplateStore::keys() const {
    std::vector<long> out;
    out.reserve(by_key_.size());
    for (const auto& [k, t] : by_key_) out.push_back(k);
    return out;
}

void TemplateStore::save(std::ostream& os) const {
    os << "#mlad-templates 1\n";
    for (const auto& [key, t] : by_key_) {
        os << key << '\t' << t.support_count << '\t';
        for (std::size_t i = 0; i < t.tokens.size(); ++i) {
            if (i) os << ' ';
            os << t.tokens[i];
        }
        os << '\n';
    }
}

void TemplateStore::save_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open " + path + " for writing");
    save(os);
}

TemplateStore TemplateStore::load(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header != "#mlad-templates 1")
        throw DataError("bad template store header: '" + header + "'");
    TemplateStore store;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos)
            throw DataError("malformed template at line " + std::to_string(lineno));
        Template t;
        t.key = std::stol(line.substr(0, t1));
        t.support_count = std::stol(line.substr(t1 + 1, t2 - t1 - 1));
        t.tokens = split_ws(line.substr(t2 + 1));
        if (t.tokens.empty())
            throw DataError("empty template at line " + std::to_string(lineno));
        store.by_key_[t.key] = t;
        store.next_key_ = std::max(store.next_key_, t.key + 1);
    }
    return store;
}

TemplateStore TemplateStore::load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open template store " + path);
    return load(is);
}

ParseTree::ParseTree(DrainConfig cfg, TemplateStore& store)
    : cfg_(std::move(cfg)), store_(store) {
    if (cfg_.depth < 3) throw DataError("drain depth must be >= 3");
    if (cfg_.similarity_threshold <= 0.0 || cfg_.similarity_threshold >= 1.0)
        throw DataError("drain similarity threshold must be in (0,1)");
    if (cfg_.max_children <= 0) throw DataError("drain max_children must be positive");
}

ParseTree::LeafGroup& ParseTree::descend(const std::vector<std::string>& tokens) {
    Inner* node = &by_length_[tokens.size()];
    const int levels = cfg_.depth - 2; // leading-token levels
    for (int lvl = 0; lvl < levels; ++lvl) {
        // Short lines descend through a padding branch so every path has
        // the configured length.
        const std::string& key = lvl < static_cast<int>(tokens.size())
                                     ? tokens[static_cast<std::size_t>(lvl)]
                                     : kWildcard;
        auto it = node->children.find(key);
        if (it == node->children.end()) {
            if (static_cast<int>(node->children.size()) >= cfg_.max_children) {
                // Overflow routes to the catch-all branch.
                node = &node->children[kWildcard];
                continue;
            }
            it = node->children.emplace(key, Inner{}).first;
        }
        node = &it->second;
    }
    if (!node->leaf) node->leaf.emplace();
    return *node->leaf;
}

std::pair<long, bool> ParseTree::parse_line(const std::vector<std::string>& tokens) {
    if (tokens.empty()) throw ContractError("parse_line: empty token list");
    LeafGroup& group = descend(tokens);

    double best_sim = -1.0;
    long best_key = -1;
    for (long key : group.template_keys) {
        const Template& t = store_.by_key(key);
        if (t.tokens.size() != tokens.size()) continue;
        int same = 0;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (t.tokens[i] == tokens[i] || t.tokens[i] == kWildcard) ++same;
        }
        const double sim = static_cast<double>(same) / static_cast<double>(tokens.size());
        if (sim > best_sim) {
            best_sim = sim;
            best_key = key;
        }
    }

    if (best_key >= 0 && best_sim >= cfg_.similarity_threshold) {
        Template& t = store_.by_key(best_key);
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (t.tokens[i] != tokens[i]) t.tokens[i] = kWildcard;
        }
        ++t.support_count;
        return {best_key, false};
    }
    const long key = store_.add(tokens);
    group.template_keys.push_back(key);
    return {key, true};
}

void ParseTree::seed(const TemplateStore& store) {
    for (long key : store.keys()) {
        const Template& t = store.by_key(key);
        LeafGroup& group = descend(t.tokens);
        group.template_keys.push_back(key);
    }
}

ParseResult parse_corpus(const std::vector<std::string>& lines, const DrainConfig& cfg,
                         const TemplateStore* seed_store) {
    ParseResult result;
    if (seed_store != nullptr) result.store = *seed_store;
    ParseTree tree(cfg, result.store);
    if (seed_store != nullptr) tree.seed(*seed_store);
    result.keys_per_line.reserve(lines.size());
    for (const auto& line : lines) {
        const auto tokens = preprocess(line, cfg);
        if (tokens.empty()) {
            result.keys_per_line.push_back(-1);
            ++result.skipped;
            continue;
        }
        result.keys_per_line.push_back(tree.parse_line(tokens).first);
    }
    return result;
}

ParseResult parse_corpus_file(const std::string& path, const DrainConfig& cfg) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open corpus " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    if (is.bad())
        throw DataError("I/O error reading " + path + " near line " +
                        std::to_string(lines.size() + 1));
    return parse_corpus(lines, cfg);
}

} // namespace mlad
