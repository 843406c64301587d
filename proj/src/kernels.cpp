#include "mlad/kernels.hpp"

#include <cmath>
#include <cstdlib>

#include "mlad/error.hpp"

namespace mlad::kern {

namespace {

double scalar_dot(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void scalar_axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scalar_add(const double* x, const double* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + y[i];
}

void scalar_sub(const double* x, const double* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - y[i];
}

void scalar_mul(const double* x, const double* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void scalar_scale(const double* x, double a, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i];
}

double scalar_sum(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

bool scalar_all_finite(const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(x[i])) return false;
    }
    return true;
}

const Backend kScalar = {
    "scalar",   scalar_dot,   scalar_axpy, scalar_add,
    scalar_sub, scalar_mul,   scalar_scale, scalar_sum,
    scalar_all_finite,
};

const Backend* g_active = nullptr;

const Backend* pick_default() {
    if (const char* env = std::getenv("MLAD_KERNEL_BACKEND")) {
        const std::string want(env);
        if (want == "scalar") return &scalar_backend();
#if defined(MLAD_HAVE_AVX2)
        if (want == "avx2" && avx2_supported()) return &avx2_backend();
#endif
        // Unknown value: fall through to auto-detection.
    }
#if defined(MLAD_HAVE_AVX2)
    if (avx2_supported()) return &avx2_backend();
#endif
    return &scalar_backend();
}

} // namespace

const Backend& scalar_backend() { return kScalar; }

bool avx2_supported() {
#if defined(MLAD_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Backend& active() {
    if (g_active == nullptr) g_active = pick_default();
    return *g_active;
}

void select(const std::string& name) {
    if (name == "scalar") {
        g_active = &scalar_backend();
        return;
    }
#if defined(MLAD_HAVE_AVX2)
    if (name == "avx2") {
        if (!avx2_supported())
            throw DataError("kernel backend 'avx2' not supported on this CPU");
        g_active = &avx2_backend();
        return;
    }
#endif
    throw DataError("unknown kernel backend '" + name + "'");
}

} // namespace mlad::kern
