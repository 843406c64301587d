#pragma once

#include <span>
#include <vector>

#include "mlad/graph.hpp"
#include "mlad/rng.hpp"
#include "mlad/tensor.hpp"

namespace mlad {

// Estimation-network head: soft mixture assignment of a window code.
struct MembershipHead {
    ad::NodePtr W_h; // [d_h, K]
    ad::NodePtr b;   // [1, K]
    double alpha = 1.5;

    static MembershipHead init(int d_h, int K, double alpha, Rng& rng);
    std::vector<ad::NodePtr> all() const { return {W_h, b}; }
};

// Membership as a graph node: entmax(h W_h + b), rows on the simplex.
ad::NodePtr membership(const ad::NodePtr& h, const MembershipHead& head);

// Plain counterpart for frozen-model scoring.
std::vector<double> membership_plain(std::span<const double> h, const Tensor& W_h,
                                     const Tensor& b, double alpha);

struct GmmStats {
    std::vector<double> phi;    // K mixture weights, inactive components at 0
    Tensor mu;                  // [K, d_h]
    std::vector<Tensor> sigma;  // K of [d_h, d_h], symmetrized + epsilon*I
    std::vector<bool> active;   // column sum > 0 in the estimating batch
    double epsilon = 1e-6;
};

// Batch parameter estimation from codes H [N, d_h] and memberships Y [N, K].
// Components with zero total membership are marked inactive and excluded
// from the energy; all-inactive is an error.
GmmStats estimate(const Tensor& H, const Tensor& Y, double epsilon);

// Negative log-likelihood of a code under the mixture, computed in the log
// domain: per-component quadratic forms via Cholesky solves, log-determinant
// from the factor diagonal, combined by log-sum-exp.
double energy(std::span<const double> h, const GmmStats& stats);

// Diagonal-reciprocal singularity penalty over active components.
double cov_penalty(const GmmStats& stats);

inline double energy(std::initializer_list<double> h, const GmmStats& stats) {
    return energy(std::span<const double>(h.begin(), h.size()), stats);
}

inline std::vector<double> membership_plain(std::initializer_list<double> h, const Tensor& W_h,
                                            const Tensor& b, double alpha) {
    return membership_plain(std::span<const double>(h.begin(), h.size()), W_h, b, alpha);
}

// Differentiable batch counterpart used inside the training objective.
// Estimates the mixture from (H, Y) and yields per-sample energies plus the
// covariance penalty as graph nodes.
struct GmmGraph {
    ad::NodePtr energies;  // [N, 1]
    ad::NodePtr penalty;   // scalar
    std::vector<bool> active;
};

GmmGraph gmm_graph_terms(const ad::NodePtr& H, const ad::NodePtr& Y, double epsilon);

} // namespace mlad
