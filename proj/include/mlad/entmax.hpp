#pragma once

#include <span>
#include <vector>

namespace mlad {

// alpha-entmax simplex transformation. alpha=1 is softmax, alpha=2 is
// sparsemax; both route to closed forms. Intermediate alphas solve the
// threshold by bisection.
struct EntmaxConfig {
    double alpha = 1.5;
    int bisection_iters = 50;
    double tol = 1e-9;
};

// Probability vector on the simplex. Inputs are max-subtracted first, which
// is exact by translation invariance. Throws NumericError on non-finite
// input, ContractError on alpha outside [1, 2].
std::vector<double> entmax(std::span<const double> x, const EntmaxConfig& cfg);

inline std::vector<double> entmax(std::span<const double> x, double alpha) {
    EntmaxConfig cfg;
    cfg.alpha = alpha;
    return entmax(x, cfg);
}

// Entropy family regularizing the entmax objective: Shannon entropy at
// alpha=1, the generalized alpha form otherwise. Rejects inputs farther than
// 1e-6 from the simplex.
double tsallis_entropy(std::span<const double> p, double alpha);

// J^T * upstream for the entmax map, where p = entmax(x, alpha) from the
// same call. On the support, J = diag(s) - s s^T / sum(s) with
// s_i = p_i^(2-alpha); zero off-support.
std::vector<double> entmax_jacobian_vp(std::span<const double> x, std::span<const double> p,
                                       double alpha, std::span<const double> upstream);

} // namespace mlad
