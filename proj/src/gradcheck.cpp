#include "mlad/gradcheck.hpp"

#include <cmath>

#include "mlad/error.hpp"

namespace mlad::ad {

double grad_check(const std::function<NodePtr()>& f, const std::vector<NodePtr>& params,
                  double h) {
    if (h < 1e-6 || h > 1e-4)
        throw ContractError("grad_check: step must be in [1e-6, 1e-4], got " +
                            std::to_string(h));

    const double v1 = f()->value.data()[0];
    const double v2 = f()->value.data()[0];
    if (v1 != v2)
        throw ContractError("grad_check: function is non-deterministic (" +
                            std::to_string(v1) + " vs " + std::to_string(v2) + ")");

    zero_grad(params);
    NodePtr root = f();
    backward(root);
    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (const auto& p : params) {
        analytic.emplace_back(p->grad.data().begin(), p->grad.data().end());
    }

    double max_rel = 0.0;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        auto data = params[pi]->value.data();
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double orig = data[i];
            data[i] = orig + h;
            const double fp = f()->value.data()[0];
            data[i] = orig - h;
            const double fm = f()->value.data()[0];
            data[i] = orig;
            const double numeric = (fp - fm) / (2.0 * h);
            const double rel = std::abs(analytic[pi][i] - numeric) /
                               std::max(1.0, std::abs(numeric));
            if (rel > max_rel) max_rel = rel;
        }
    }
    return max_rel;
}

} // namespace mlad::ad
