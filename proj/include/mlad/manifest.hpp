#pragma once

#include <string>
#include <vector>

namespace mlad {

inline constexpr const char* kToolVersion = "mlad 0.1.0";

// FNV-1a 64 digest of a file's bytes, as "0x" hex.
std::string file_digest(const std::string& path);

// JSON run manifest written beside each command's artifacts: config
// snapshot, seed, input paths with content digests, artifact paths with
// digests, and the tool version. Enough to reproduce the run bit-identically
// (no timestamps).
struct RunManifest {
    std::string command;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> config; // key, value
    std::vector<std::string> inputs;
    std::vector<std::string> artifacts;

    void save(const std::string& path) const; // digests computed here
};

} // namespace mlad
