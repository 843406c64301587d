#include "mlad/entmax.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mlad/error.hpp"

namespace mlad {

namespace {

void check_input(std::span<const double> x) {
    if (x.empty()) throw ContractError("entmax: empty input");
    for (double v : x) {
        if (!std::isfinite(v)) throw NumericError("entmax: non-finite input entry");
    }
}

std::vector<double> softmax(std::span<const double> x) {
    const double m = *std::max_element(x.begin(), x.end());
    std::vector<double> p(x.size());
    double z = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        p[i] = std::exp(x[i] - m);
        z += p[i];
    }
    for (double& v : p) v /= z;
    return p;
}

std::vector<double> sparsemax(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<double> z(x.begin(), x.end());
    const double m = *std::max_element(z.begin(), z.end());
    for (double& v : z) v -= m;

    std::vector<double> sorted = z;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double cumsum = 0.0;
    double tau = 0.0;
    int support = 0;
    for (std::size_t k = 0; k < n; ++k) {
        cumsum += sorted[k];
        const double kk = static_cast<double>(k + 1);
        if (1.0 + kk * sorted[k] > cumsum) {
            support = static_cast<int>(k + 1);
            tau = (cumsum - 1.0) / kk;
        }
    }
    (void)support;
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = std::max(0.0, z[i] - tau);
    return p;
}

// 1 < alpha < 2: p_i = [(alpha-1) x_i - tau]_+^(1/(alpha-1)), tau found by
// bisection on the simplex constraint.
std::vector<double> entmax_bisect(std::span<const double> x, double alpha, int iters,
                                  double tol) {
    const std::size_t n = x.size();
    const double am1 = alpha - 1.0;
    const double inv_exp = 1.0 / am1;
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = x[i] * am1;
    const double m = *std::max_element(z.begin(), z.end());
    for (double& v : z) v -= m;

    // sum(p) is decreasing in tau; sum >= 1 at tau = -1 and sum < 1 at tau = 0.
    // All iterations run (50 halvings reach double precision); tol only
    // bounds the residual simplex violation before the final normalization.
    double lo = -1.0;
    double hi = 0.0;
    std::vector<double> p(n);
    auto mass_at = [&](double tau) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = z[i] - tau;
            p[i] = t > 0.0 ? std::pow(t, inv_exp) : 0.0;
            s += p[i];
        }
        return s;
    };
    for (int it = 0; it < iters; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mass_at(mid) >= 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double s = mass_at(lo);
    if (std::abs(s - 1.0) > tol)
        throw NumericError("entmax: bisection left simplex residual " + std::to_string(s - 1.0));
    for (double& v : p) v /= s;
    return p;
}

} // namespace

std::vector<double> entmax(std::span<const double> x, const EntmaxConfig& cfg) {
    check_input(x);
    if (cfg.alpha < 1.0 || cfg.alpha > 2.0)
        throw ContractError("entmax: alpha must be in [1, 2], got " + std::to_string(cfg.alpha));
    if (x.size() == 1) return {1.0};
    if (cfg.alpha == 1.0) return softmax(x);
    if (cfg.alpha == 2.0) return sparsemax(x);
    return entmax_bisect(x, cfg.alpha, cfg.bisection_iters, cfg.tol);
}

double tsallis_entropy(std::span<const double> p, double alpha) {
    double sum = 0.0;
    for (double v : p) {
        if (v < -1e-6) throw ContractError("tsallis_entropy: negative probability");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6)
        throw ContractError("tsallis_entropy: probabilities sum to " + std::to_string(sum));

    if (alpha == 1.0) {
        double h = 0.0;
        for (double v : p) {
            if (v > 0.0) h -= v * std::log(v);
        }
        return h;
    }
    double acc = 0.0;
    for (double v : p) {
        const double q = std::max(v, 0.0);
        acc += q - std::pow(q, alpha);
    }
    return acc / (alpha * (alpha - 1.0));
}

std::vector<double> entmax_jacobian_vp(std::span<const double> x, std::span<const double> p,
                                       double alpha, std::span<const double> upstream) {
    (void)x; // p must come from entmax(x, alpha); kept for call-site clarity.
    const std::size_t n = p.size();
    if (upstream.size() != n)
        throw DimensionError("entmax_jacobian_vp: upstream length mismatch");

    std::vector<double> s(n, 0.0);
    double s_sum = 0.0;
    double su = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (p[i] > 0.0) {
            s[i] = alpha == 1.0 ? p[i] : std::pow(p[i], 2.0 - alpha);
            s_sum += s[i];
            su += s[i] * upstream[i];
        }
    }
    if (s_sum <= 0.0) throw ContractError("entmax_jacobian_vp: empty support");

    std::vector<double> out(n, 0.0);
    const double ratio = su / s_sum;
    for (std::size_t i = 0; i < n; ++i) {
        if (p[i] > 0.0) out[i] = s[i] * (upstream[i] - ratio);
    }
    return out;
}

} // namespace mlad
