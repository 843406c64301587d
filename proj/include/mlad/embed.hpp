#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "mlad/dataset.hpp"
#include "mlad/logparse.hpp"
#include "mlad/tensor.hpp"

namespace mlad {

enum class EmbeddingSource { Imported, Hashed };

struct EmbeddingTable {
    int dim = 0;
    std::unordered_map<long, std::vector<double>> vectors;
    EmbeddingSource source = EmbeddingSource::Hashed;

    const std::vector<double>& lookup(long key) const;
};

// Reads a vector file (UTF-8 TSV: first line "#dim d", then
// template_key TAB d space-separated floats) and checks it covers every key
// in the store.
EmbeddingTable import_vectors(const std::string& path, const TemplateStore& store);
void export_vectors(const EmbeddingTable& table, const std::string& path);

// Deterministic feature-hashed embedding: every non-wildcard token lands in
// one of d buckets with a +-1 sign from a second hash, token vectors are
// mean-pooled and the result L2-normalized. All-wildcard templates map to
// the zero vector. Stable across runs and platforms (FNV-1a based).
std::vector<double> hash_embed(const Template& tmpl, int d);

// Hash-embeds every template in the store.
EmbeddingTable hashed_table(const TemplateStore& store, int d);

// Row-stacks the window's template vectors into an l x d matrix.
Tensor build_matrix(const Window& window, const EmbeddingTable& table);

} // namespace mlad
