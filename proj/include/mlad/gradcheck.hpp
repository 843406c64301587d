#pragma once

#include <functional>
#include <vector>

#include "mlad/graph.hpp"

namespace mlad::ad {

// Compares analytic parameter gradients of a scalar function against central
// finite differences. f rebuilds its graph from the parameters' current
// values on every call; it must be deterministic (verified by evaluating
// twice) and h must lie in [1e-6, 1e-4].
//
// Returns max over all parameter entries of |analytic - numeric| / max(1, |numeric|).
double grad_check(const std::function<NodePtr()>& f, const std::vector<NodePtr>& params,
                  double h);

} // namespace mlad::ad
