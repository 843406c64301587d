#include "mlad/linalg.hpp"

#include <cmath>

#include "mlad/error.hpp"
#include "mlad/kernels.hpp"

namespace mlad {

Tensor cholesky(const Tensor& a) {
    if (a.rank() != 2 || a.rows() != a.cols())
        throw DimensionError("cholesky: expected square matrix, got " + a.shape_string());
    const int n = a.rows();
    Tensor l = Tensor::zeros({n, n});
    const auto& be = kern::active();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double s = be.dot(l.row(i).data(), l.row(j).data(), static_cast<std::size_t>(j));
            if (i == j) {
                const double d = a.at(i, i) - s;
                if (d <= 0.0)
                    throw NumericError("cholesky: non-positive pivot at index " +
                                       std::to_string(i));
                l.at(i, i) = std::sqrt(d);
            } else {
                l.at(i, j) = (a.at(i, j) - s) / l.at(j, j);
            }
        }
    }
    return l;
}

void chol_solve_inplace(const Tensor& l, double* b, int m) {
    const int n = l.rows();
    const auto& be = kern::active();
    const std::size_t w = static_cast<std::size_t>(m);
    // Forward substitution: L y = b.
    for (int i = 0; i < n; ++i) {
        double* bi = b + static_cast<std::size_t>(i) * w;
        for (int j = 0; j < i; ++j) {
            be.axpy(-l.at(i, j), b + static_cast<std::size_t>(j) * w, bi, w);
        }
        be.scale(bi, 1.0 / l.at(i, i), bi, w);
    }
    // Back substitution: L^T x = y.
    for (int i = n - 1; i >= 0; --i) {
        double* bi = b + static_cast<std::size_t>(i) * w;
        for (int j = i + 1; j < n; ++j) {
            be.axpy(-l.at(j, i), b + static_cast<std::size_t>(j) * w, bi, w);
        }
        be.scale(bi, 1.0 / l.at(i, i), bi, w);
    }
}

Tensor chol_solve(const Tensor& l, const Tensor& b) {
    if (b.rank() != 2 || b.rows() != l.rows())
        throw DimensionError("chol_solve: rhs shape " + b.shape_string() +
                             " does not match factor " + l.shape_string());
    Tensor x = b;
    chol_solve_inplace(l, x.raw(), x.cols());
    x.check_finite("chol_solve");
    return x;
}

double chol_logdet(const Tensor& l) {
    double acc = 0.0;
    for (int i = 0; i < l.rows(); ++i) acc += std::log(l.at(i, i));
    return 2.0 * acc;
}

Tensor chol_inverse(const Tensor& l) {
    return chol_solve(l, Tensor::eye(l.rows()));
}

} // namespace mlad
