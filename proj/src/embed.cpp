#include "mlad/embed.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mlad/error.hpp"
#include "mlad/rng.hpp"

namespace mlad {

const std::vector<double>& EmbeddingTable::lookup(long key) const {
    auto it = vectors.find(key);
    if (it == vectors.end())
        throw DataError("template key " + std::to_string(key) +
                        " missing from embedding table (vocabulary drift between parse "
                        "and embed stages)");
    return it->second;
}

EmbeddingTable import_vectors(const std::string& path, const TemplateStore& store) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open vector file " + path);
    std::string line;
    if (!std::getline(is, line)) throw DataError("empty vector file " + path);
    int dim = 0;
    if (std::sscanf(line.c_str(), "#dim %d", &dim) != 1 || dim <= 0)
        throw DataError("vector file " + path + ": bad header '" + line + "'");

    EmbeddingTable table;
    table.dim = dim;
    table.source = EmbeddingSource::Imported;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw DataError(path + ": unparseable row at line " + std::to_string(lineno));
        long key = 0;
        try {
            key = std::stol(line.substr(0, tab));
        } catch (const std::exception&) {
            throw DataError(path + ": bad key at line " + std::to_string(lineno));
        }
        std::istringstream vs(line.substr(tab + 1));
        std::vector<double> vec;
        vec.reserve(static_cast<std::size_t>(dim));
        double v;
        while (vs >> v) vec.push_back(v);
        if (static_cast<int>(vec.size()) != dim)
            throw DataError(path + ": dimension mismatch at line " + std::to_string(lineno) +
                            " (expected " + std::to_string(dim) + ", got " +
                            std::to_string(vec.size()) + ")");
        for (double x : vec) {
            if (!std::isfinite(x))
                throw DataError(path + ": non-finite value at line " + std::to_string(lineno));
        }
        table.vectors[key] = std::move(vec);
    }

    std::string missing;
    for (long key : store.keys()) {
        if (table.vectors.count(key) == 0) {
            if (!missing.empty()) missing += ", ";
            missing += std::to_string(key);
        }
    }
    if (!missing.empty())
        throw DataError("vector file " + path + " missing template keys: " + missing);
    return table;
}

void export_vectors(const EmbeddingTable& table, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open " + path + " for writing");
    os << "#dim " << table.dim << "\n";
    std::vector<long> keys;
    keys.reserve(table.vectors.size());
    for (const auto& [k, v] : table.vectors) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    char buf[64];
    for (long k : keys) {
        os << k << '\t';
        const auto& vec = table.vectors.at(k);
        for (std::size_t i = 0; i < vec.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", vec[i]);
            if (i) os << ' ';
            os << buf;
        }
        os << '\n';
    }
}

std::vector<double> hash_embed(const Template& tmpl, int d) {
    if (d < 8) throw DataError("hashed embedding dimension must be >= 8");
    std::vector<double> acc(static_cast<std::size_t>(d), 0.0);
    int used = 0;
    for (const auto& tok : tmpl.tokens) {
        if (tok == kWildcard) continue;
        const std::uint64_t h1 = fnv1a64(tok.data(), tok.size());
        const std::uint64_t h2 = fnv1a64(tok.data(), tok.size(), 0x9ae16a3b2f90404full);
        const std::size_t bucket = static_cast<std::size_t>(h1 % static_cast<std::uint64_t>(d));
        acc[bucket] += (h2 & 1) ? 1.0 : -1.0;
        ++used;
    }
    if (used == 0) return acc; // all-wildcard template: zero vector
    double norm2 = 0.0;
    for (double& v : acc) {
        v /= used; // mean pooling over token vectors
        norm2 += v * v;
    }
    if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& v : acc) v *= inv;
    }
    return acc;
}

EmbeddingTable hashed_table(const TemplateStore& store, int d) {
    EmbeddingTable table;
    table.dim = d;
    table.source = EmbeddingSource::Hashed;
    for (long key : store.keys()) {
        table.vectors[key] = hash_embed(store.by_key(key), d);
    }
    return table;
}

Tensor build_matrix(const Window& window, const EmbeddingTable& table) {
    const int l = static_cast<int>(window.keys.size());
    Tensor t = Tensor::zeros({l, table.dim});
    for (int i = 0; i < l; ++i) {
        const auto& vec = table.lookup(window.keys[static_cast<std::size_t>(i)]);
        std::copy(vec.begin(), vec.end(), t.row(i).begin());
    }
    return t;
}

} // namespace mlad
