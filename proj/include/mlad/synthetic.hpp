#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mlad {

// Synthetic multi-mode service-log generator with planted rare-keyword
// anomalies. Windows are emitted as consecutive line blocks of window_len,
// so sliding windowing at the same size reconstructs them exactly.
//
// System "A" and system "B" draw from overlapping template pools (half the
// vocabulary is shared) and use different rare anomaly keywords, which is
// what transfer evaluation exercises.
struct SynthConfig {
    std::uint64_t seed = 1;
    int n_windows = 1000;
    int window_len = 20;
    double anomaly_rate = 0.05;
    int anomaly_lines = 2;   // planted lines per anomalous window
    std::string system = "A";
    int modes = 4;           // distinct normal behavior modes
};

struct SynthCorpus {
    std::vector<std::string> lines;
    std::vector<int> labels; // per line; 1 only on planted anomaly lines
    int n_anomalous_windows = 0;
};

SynthCorpus generate_corpus(const SynthConfig& cfg);

} // namespace mlad
