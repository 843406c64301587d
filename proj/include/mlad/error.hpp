#pragma once

#include <stdexcept>
#include <string>

namespace mlad {

// Shape mismatches between tensors; message names both shapes.
struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric domain violations: log of non-positive input, NaN/Inf entering a
// tensor, failed SPD factorization.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Broken API contracts: non-scalar backward root, off-simplex probability
// input, anomalous window inside a training batch.
struct ContractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad input data or configuration: unreadable files, missing template keys,
// misaligned labels, impossible splits.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace mlad
