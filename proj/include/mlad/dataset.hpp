#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mlad/logparse.hpp"

namespace mlad {

struct LogRecord {
    long index = 0;        // position in the corpus
    long template_key = 0; // -1 for skipped lines (never windowized)
    int label = 0;         // 0 normal, 1 anomalous
    std::string session_id;
};

struct Window {
    std::vector<long> keys; // length >= 2
    int label = 0;          // anomalous iff any member record is anomalous
    std::string origin;
    std::string session_id;
};

enum class WindowMode { Sliding, Session };

struct SplitSpec {
    std::uint64_t seed = 1;
    WindowMode mode = WindowMode::Sliding;
    int window_size = 20;     // sliding mode; >= 2
    int max_session_len = 512; // session windows are truncated to this
};

// Builds records by aligning per-line template keys with per-line labels.
// Skipped lines (key -1) are dropped; label count must match the raw line
// count.
std::vector<LogRecord> make_records(const std::vector<long>& keys_per_line,
                                    const std::vector<int>& labels_per_line);

struct SessionizeResult {
    std::vector<LogRecord> records; // only records with a matched id
    std::size_t dropped = 0;        // lines without an id
};

// Tags each record with the first id_pattern match in its raw line; records
// without a match are dropped with a counted warning. Zero matches is a
// configuration error.
SessionizeResult sessionize(const std::vector<LogRecord>& records,
                            const std::vector<std::string>& raw_lines,
                            const std::string& id_pattern);

// Overrides record labels from a per-session map ("block id" CSV style).
void apply_session_labels(std::vector<LogRecord>& records,
                          const std::vector<std::pair<std::string, int>>& session_labels);

std::vector<Window> windowize(const std::vector<LogRecord>& records, const SplitSpec& spec,
                              const std::string& origin);

struct Split {
    std::vector<Window> train; // normal-only
    std::vector<Window> test;  // all anomalous + equally many seeded-random normal
};

Split split(const std::vector<Window>& windows, std::uint64_t seed);

struct PreparedDataset {
    std::string name;
    std::vector<Window> windows;
    TemplateStore store;
};

// Concatenates datasets with template keys namespaced per origin, then
// shuffles by seed. Origins are preserved for per-system metric breakdowns.
PreparedDataset fuse(const std::vector<PreparedDataset>& parts, std::uint64_t seed);

// Line-oriented text format: origin TAB label TAB comma-joined keys
// (TAB session_id when present).
void save_windows(const std::vector<Window>& windows, std::ostream& os);
void save_windows_file(const std::vector<Window>& windows, const std::string& path);
std::vector<Window> load_windows(std::istream& is);
std::vector<Window> load_windows_file(const std::string& path);

// Labels file: one {0,1} per line, aligned with the raw corpus.
std::vector<int> load_labels_file(const std::string& path);
// HDFS-style CSV of (block_id, label); accepts 0/1 or Normal/Anomaly and
// skips a header row.
std::vector<std::pair<std::string, int>> load_session_labels_csv(const std::string& path);

} // namespace mlad
