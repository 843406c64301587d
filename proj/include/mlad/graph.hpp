#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mlad/entmax.hpp"
#include "mlad/rng.hpp"
#include "mlad/tensor.hpp"

namespace mlad::ad {

// One vertex of the reverse-mode graph. Values are computed eagerly at op
// construction; backprop closures pull from this node's gradient and
// accumulate into the parents'. The parent edges form a DAG.
struct Node {
    Tensor value;
    Tensor grad; // zero-initialized, always value's shape
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backprop;
    // True when a trainable leaf is reachable; dead subgraphs skip backprop.
    bool live = false;
    std::string name;

    explicit Node(Tensor v) : value(std::move(v)), grad(Tensor::zeros(value.shape())) {}
};

using NodePtr = std::shared_ptr<Node>;

NodePtr leaf(Tensor v, std::string name = "");
NodePtr constant(Tensor v);

// Accumulates d(root)/d(node) into every reachable node's gradient. The root
// must be scalar-shaped ([] or [1]). Leaf gradients accumulate across
// repeated calls until explicitly zeroed; interior node gradients are
// recomputed per call.
void backward(const NodePtr& root);

void zero_grad(const std::vector<NodePtr>& params);

// --- ops ---------------------------------------------------------------

NodePtr matmul(const NodePtr& a, const NodePtr& b);
NodePtr transpose(const NodePtr& a);

// Binary elementwise; shapes must match exactly or one side must be a
// one-element tensor (scalar broadcast).
NodePtr add(const NodePtr& a, const NodePtr& b);
NodePtr sub(const NodePtr& a, const NodePtr& b);
NodePtr mul(const NodePtr& a, const NodePtr& b);
NodePtr div(const NodePtr& a, const NodePtr& b);

NodePtr exp_(const NodePtr& a);
NodePtr log_(const NodePtr& a); // rejects non-positive input
NodePtr sqrt_(const NodePtr& a); // rejects negative input
NodePtr neg(const NodePtr& a);
NodePtr scale(const NodePtr& a, double c);
NodePtr add_const(const NodePtr& a, double c);

NodePtr sum(const NodePtr& a);            // -> scalar []
NodePtr row_sum(const NodePtr& a);        // [m,n] -> [m,1]
NodePtr col_sum(const NodePtr& a);        // [m,n] -> [1,n]
NodePtr mean_over_rows(const NodePtr& a); // [m,n] -> [1,n]

NodePtr add_rowvec(const NodePtr& a, const NodePtr& v);   // [m,n] + [1,n]
NodePtr scale_rows(const NodePtr& a, const NodePtr& s);   // [m,n] scaled by [m,1]

NodePtr slice_cols(const NodePtr& a, int c0, int c1);
NodePtr concat_cols(const std::vector<NodePtr>& parts);
NodePtr stack_rows(const std::vector<NodePtr>& rows); // list of [1,n] -> [m,n]

NodePtr layer_norm(const NodePtr& x, const NodePtr& gain, const NodePtr& bias,
                   double eps = 1e-5);
NodePtr celu(const NodePtr& x); // alpha fixed at 1
NodePtr dropout(const NodePtr& x, double p, Rng& rng, bool train);

NodePtr entmax_rows(const NodePtr& x, const EntmaxConfig& cfg);
NodePtr logsumexp_rows(const NodePtr& x); // [m,n] -> [m,1]

NodePtr spd_solve(const NodePtr& a, const NodePtr& b); // A^{-1} B, A SPD
NodePtr logdet_spd(const NodePtr& a);                  // -> scalar []
NodePtr diag_part(const NodePtr& a);                   // [n,n] -> [1,n]

} // namespace mlad::ad
