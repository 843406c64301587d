#include "mlad/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "mlad/error.hpp"
#include "mlad/rng.hpp"

namespace mlad {

std::string file_digest(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open " + path + " for digest");
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
        h = fnv1a64(buf, static_cast<std::size_t>(is.gcount()), h);
        if (is.eof()) break;
    }
    char out[32];
    std::snprintf(out, sizeof(out), "0x%016llx", static_cast<unsigned long long>(h));
    return out;
}

void RunManifest::save(const std::string& path) const {
    nlohmann::json j;
    j["tool"] = kToolVersion;
    j["command"] = command;
    j["seed"] = seed;
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    j["config"] = cfg;
    auto files = [](const std::vector<std::string>& paths) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : paths) {
            arr.push_back({{"path", p}, {"fnv1a64", file_digest(p)}});
        }
        return arr;
    };
    j["inputs"] = files(inputs);
    j["artifacts"] = files(artifacts);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open " + path + " for writing");
    os << j.dump(2) << "\n";
}

} // namespace mlad
