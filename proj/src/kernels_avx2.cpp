// AVX2/FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma and must only be entered after the runtime CPU check in
// kernels.cpp, so it deliberately contains nothing but the kernels.
#include <immintrin.h>

#include <cstddef>

#include "mlad/kernels.hpp"

namespace mlad::kern {

namespace {

double avx2_dot(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vy = _mm256_loadu_pd(y + i);
        acc = _mm256_fmadd_pd(vx, vy, acc);
    }
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    lo = _mm_add_pd(lo, hi);
    double out = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) out += x[i] * y[i];
    return out;
}

void avx2_axpy(double a, const double* x, double* y, std::size_t n) {
    // mul+add rather than fma so results stay bit-identical to the scalar
    // reference; matmul forward paths are built on axpy.
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vy = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void avx2_add(const double* x, const double* y, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i,
                         _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) out[i] = x[i] + y[i];
}

void avx2_sub(const double* x, const double* y, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i,
                         _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) out[i] = x[i] - y[i];
}

void avx2_mul(const double* x, const double* y, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i,
                         _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) out[i] = x[i] * y[i];
}

void avx2_scale(const double* x, double a, double* out, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) out[i] = a * x[i];
}

double avx2_sum(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    }
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    lo = _mm_add_pd(lo, hi);
    double out = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) out += x[i];
    return out;
}

bool avx2_all_finite(const double* x, std::size_t n) {
    // x - x is 0 for finite values and NaN for Inf/NaN inputs.
    std::size_t i = 0;
    const __m256d zero = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        const __m256d d = _mm256_sub_pd(v, v);
        const __m256d ok = _mm256_cmp_pd(d, zero, _CMP_EQ_OQ);
        if (_mm256_movemask_pd(ok) != 0xF) return false;
    }
    for (; i < n; ++i) {
        const double d = x[i] - x[i];
        if (!(d == 0.0)) return false;
    }
    return true;
}

const Backend kAvx2 = {
    "avx2",   avx2_dot, avx2_axpy,  avx2_add,
    avx2_sub, avx2_mul, avx2_scale, avx2_sum,
    avx2_all_finite,
};

} // namespace

const Backend& avx2_backend() { return kAvx2; }

} // namespace mlad::kern
