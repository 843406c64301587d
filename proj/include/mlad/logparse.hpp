#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

namespace mlad {

// A masking rule applied to the raw line before tokenization; variable parts
// (hex literals, block ids, ...) become the wildcard token.
struct Mask {
    std::string name;
    std::string pattern;
    std::string placeholder = "<*>";
};

// Built-in masks covering IPv4 addresses, hex literals, decimal integers,
// HDFS block ids and file paths, applied in that order of specificity.
std::vector<Mask> default_masks();

struct DrainConfig {
    int depth = 4;                     // >= 3; root -> length -> leading tokens -> leaf
    double similarity_threshold = 0.4; // in (0,1)
    int max_children = 100;
    std::vector<Mask> masks = default_masks();
    std::string strip_prefix; // optional regex removed from the line start
};

struct Template {
    long key = 0;
    std::vector<std::string> tokens;
    long support_count = 0;
};

// Wildcard token literal.
inline const std::string kWildcard = "<*>";

class TemplateStore {
public:
    long add(std::vector<std::string> tokens); // returns new key
    Template& by_key(long key);
    const Template& by_key(long key) const;
    bool contains(long key) const { return by_key_.count(key) != 0; }
    std::size_t size() const { return by_key_.size(); }
    std::vector<long> keys() const;

    // Versioned text format: header line, then one template per line as
    // key TAB support_count TAB space-joined tokens.
    void save(std::ostream& os) const;
    void save_file(const std::string& path) const;
    static TemplateStore load(std::istream& is);
    static TemplateStore load_file(const std::string& path);

private:
    std::map<long, Template> by_key_;
    long next_key_ = 0;
    friend class ParseTree;
};

// Fixed-depth parse tree in the style of the Drain parser: level 1 groups by
// token count, the next depth-2 levels by leading tokens, and leaves hold
// template groups merged by similarity.
class ParseTree {
public:
    ParseTree(DrainConfig cfg, TemplateStore& store);

    // Returns (template key, is_new). Tokens must be non-empty.
    std::pair<long, bool> parse_line(const std::vector<std::string>& tokens);

    // Inserts existing templates so a corpus re-parsed against its own
    // emitted store yields identical keys.
    void seed(const TemplateStore& store);

    const DrainConfig& config() const { return cfg_; }

private:
    struct LeafGroup {
        std::vector<long> template_keys;
    };
    struct Inner {
        std::map<std::string, Inner> children;
        std::optional<LeafGroup> leaf; // set at depth
    };

    LeafGroup& descend(const std::vector<std::string>& tokens);

    DrainConfig cfg_;
    TemplateStore& store_;
    std::map<std::size_t, Inner> by_length_;
};

// Masked, whitespace-split token list; empty result means the line is
// skipped. Deterministic.
std::vector<std::string> preprocess(const std::string& line, const DrainConfig& cfg);

struct ParseResult {
    TemplateStore store;
    // One entry per raw input line: the template key, or -1 for skipped lines
    // (blank after masking). Downstream label alignment relies on this.
    std::vector<long> keys_per_line;
    std::size_t skipped = 0;
};

ParseResult parse_corpus(const std::vector<std::string>& lines, const DrainConfig& cfg,
                         const TemplateStore* seed_store = nullptr);
ParseResult parse_corpus_file(const std::string& path, const DrainConfig& cfg);

} // namespace mlad
