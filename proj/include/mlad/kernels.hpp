#pragma once

#include <cstddef>
#include <string>

namespace mlad::kern {

// Scalar reference kernels plus SIMD variants behind one dispatch table.
// The active backend is picked once (AVX2+FMA when the CPU supports both,
// scalar otherwise) and can be forced with select() or the
// MLAD_KERNEL_BACKEND environment variable before first use.
//
// Elementwise kernels (add/sub/mul/scale) are bit-identical across backends;
// reductions (dot/sum) may differ by accumulation order and are
// equivalence-tested against the scalar reference at tight tolerance.
struct Backend {
    const char* name;
    double (*dot)(const double* x, const double* y, std::size_t n);
    // y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    void (*add)(const double* x, const double* y, double* out, std::size_t n);
    void (*sub)(const double* x, const double* y, double* out, std::size_t n);
    void (*mul)(const double* x, const double* y, double* out, std::size_t n);
    void (*scale)(const double* x, double a, double* out, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    bool (*all_finite)(const double* x, std::size_t n);
};

const Backend& scalar_backend();
#if defined(MLAD_HAVE_AVX2)
const Backend& avx2_backend();
#endif

bool avx2_supported();

// Currently active backend (selected on first call).
const Backend& active();

// Force a backend by name ("scalar" or "avx2"); throws DataError if unknown
// or unsupported on this machine.
void select(const std::string& name);

} // namespace mlad::kern
