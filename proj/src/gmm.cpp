#include "mlad/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mlad/entmax.hpp"
#include "mlad/error.hpp"
#include "mlad/kernels.hpp"
#include "mlad/linalg.hpp"

namespace mlad {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

MembershipHead MembershipHead::init(int d_h, int K, double alpha, Rng& rng) {
    MembershipHead head;
    const double bound = 1.0 / std::sqrt(static_cast<double>(d_h));
    Tensor w = Tensor::zeros({d_h, K});
    for (double& v : w.data()) v = rng.uniform(-bound, bound);
    head.W_h = ad::leaf(std::move(w), "gmm.W_h");
    head.b = ad::leaf(Tensor::zeros({1, K}), "gmm.b");
    head.alpha = alpha;
    return head;
}

ad::NodePtr membership(const ad::NodePtr& h, const MembershipHead& head) {
    EntmaxConfig cfg;
    cfg.alpha = head.alpha;
    return ad::entmax_rows(ad::add_rowvec(ad::matmul(h, head.W_h), head.b), cfg);
}

std::vector<double> membership_plain(std::span<const double> h, const Tensor& W_h,
                                     const Tensor& b, double alpha) {
    const int d_h = W_h.rows();
    const int K = W_h.cols();
    if (static_cast<int>(h.size()) != d_h)
        throw DimensionError("membership: code length " + std::to_string(h.size()) +
                             " does not match head " + W_h.shape_string());
    std::vector<double> logits(b.data().begin(), b.data().end());
    for (int i = 0; i < d_h; ++i) {
        kern::active().axpy(h[static_cast<std::size_t>(i)], W_h.row(i).data(), logits.data(),
                            static_cast<std::size_t>(K));
    }
    return entmax(logits, alpha);
}

GmmStats estimate(const Tensor& H, const Tensor& Y, double epsilon) {
    if (H.rank() != 2 || Y.rank() != 2 || H.rows() != Y.rows())
        throw DimensionError("estimate: batch shapes " + H.shape_string() + " and " +
                             Y.shape_string() + " do not align");
    const int N = H.rows();
    const int d_h = H.cols();
    const int K = Y.cols();
    if (N < 2) throw ContractError("estimate: need at least 2 samples");

    GmmStats stats;
    stats.epsilon = epsilon;
    stats.phi.assign(static_cast<std::size_t>(K), 0.0);
    stats.mu = Tensor::zeros({K, d_h});
    stats.active.assign(static_cast<std::size_t>(K), false);

    std::vector<double> colsum(static_cast<std::size_t>(K), 0.0);
    for (int i = 0; i < N; ++i) {
        kern::active().axpy(1.0, Y.row(i).data(), colsum.data(), static_cast<std::size_t>(K));
    }

    int n_active = 0;
    for (int k = 0; k < K; ++k) {
        if (colsum[static_cast<std::size_t>(k)] > 0.0) {
            stats.active[static_cast<std::size_t>(k)] = true;
            stats.phi[static_cast<std::size_t>(k)] = colsum[static_cast<std::size_t>(k)] / N;
            ++n_active;
        }
    }
    if (n_active == 0) throw NumericError("estimate: every mixture component is inactive");

    // Weighted means.
    for (int i = 0; i < N; ++i) {
        for (int k = 0; k < K; ++k) {
            if (!stats.active[static_cast<std::size_t>(k)]) continue;
            kern::active().axpy(Y.at(i, k), H.row(i).data(), stats.mu.row(k).data(),
                                static_cast<std::size_t>(d_h));
        }
    }
    for (int k = 0; k < K; ++k) {
        if (!stats.active[static_cast<std::size_t>(k)]) continue;
        kern::active().scale(stats.mu.row(k).data(), 1.0 / colsum[static_cast<std::size_t>(k)],
                             stats.mu.row(k).data(), static_cast<std::size_t>(d_h));
    }

    // Weighted covariances, symmetrized then regularized.
    std::vector<double> diff(static_cast<std::size_t>(d_h));
    for (int k = 0; k < K; ++k) {
        Tensor s = Tensor::zeros({d_h, d_h});
        if (stats.active[static_cast<std::size_t>(k)]) {
            for (int i = 0; i < N; ++i) {
                const double w = Y.at(i, k);
                if (w == 0.0) continue;
                kern::active().sub(H.row(i).data(), stats.mu.row(k).data(), diff.data(),
                                   static_cast<std::size_t>(d_h));
                for (int a = 0; a < d_h; ++a) {
                    kern::active().axpy(w * diff[static_cast<std::size_t>(a)], diff.data(),
                                        s.row(a).data(), static_cast<std::size_t>(d_h));
                }
            }
            const double inv = 1.0 / colsum[static_cast<std::size_t>(k)];
            kern::active().scale(s.raw(), inv, s.raw(), s.numel());
            for (int a = 0; a < d_h; ++a) {
                for (int b = a + 1; b < d_h; ++b) {
                    const double m = 0.5 * (s.at(a, b) + s.at(b, a));
                    s.at(a, b) = m;
                    s.at(b, a) = m;
                }
            }
        }
        for (int a = 0; a < d_h; ++a) s.at(a, a) += epsilon;
        stats.sigma.push_back(std::move(s));
    }
    return stats;
}

double energy(std::span<const double> h, const GmmStats& stats) {
    const int K = static_cast<int>(stats.phi.size());
    const int d_h = stats.mu.cols();
    if (static_cast<int>(h.size()) != d_h)
        throw DimensionError("energy: code length " + std::to_string(h.size()) +
                             " does not match mixture dimension " + std::to_string(d_h));

    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> log_terms;
    log_terms.reserve(static_cast<std::size_t>(K));
    Tensor z = Tensor::zeros({d_h, 1});
    for (int k = 0; k < K; ++k) {
        if (!stats.active[static_cast<std::size_t>(k)]) continue;
        Tensor lfac;
        try {
            lfac = cholesky(stats.sigma[static_cast<std::size_t>(k)]);
        } catch (const NumericError&) {
            throw NumericError("energy: covariance factorization failed for component " +
                               std::to_string(k));
        }
        for (int a = 0; a < d_h; ++a) {
            z.data()[static_cast<std::size_t>(a)] =
                h[static_cast<std::size_t>(a)] - stats.mu.at(k, a);
        }
        Tensor solved = chol_solve(lfac, z);
        const double quad = kern::active().dot(z.raw(), solved.raw(), z.numel());
        const double term = std::log(stats.phi[static_cast<std::size_t>(k)]) - 0.5 * quad -
                            0.5 * (d_h * kLog2Pi + chol_logdet(lfac));
        log_terms.push_back(term);
        best = std::max(best, term);
    }
    if (log_terms.empty()) throw ContractError("energy: no active mixture components");
    double acc = 0.0;
    for (double t : log_terms) acc += std::exp(t - best);
    return -(best + std::log(acc));
}

double cov_penalty(const GmmStats& stats) {
    double p = 0.0;
    for (std::size_t k = 0; k < stats.sigma.size(); ++k) {
        if (!stats.active[k]) continue;
        const Tensor& s = stats.sigma[k];
        for (int a = 0; a < s.rows(); ++a) {
            const double d = s.at(a, a);
            if (d <= 0.0)
                throw NumericError("cov_penalty: non-positive diagonal in component " +
                                   std::to_string(k));
            p += 1.0 / d;
        }
    }
    return p;
}

GmmGraph gmm_graph_terms(const ad::NodePtr& H, const ad::NodePtr& Y, double epsilon) {
    const int N = H->value.rows();
    const int d_h = H->value.cols();
    const int K = Y->value.cols();
    if (Y->value.rows() != N)
        throw DimensionError("gmm terms: batch shapes " + H->value.shape_string() + " and " +
                             Y->value.shape_string() + " do not align");
    if (N < 2) throw ContractError("gmm terms: need at least 2 samples");

    GmmGraph out;
    out.active.assign(static_cast<std::size_t>(K), false);

    std::vector<ad::NodePtr> log_density_cols;
    ad::NodePtr penalty;
    const ad::NodePtr eps_eye = ad::constant(Tensor::eye(d_h, epsilon));
    const ad::NodePtr ones_diag = ad::constant(Tensor::full({1, d_h}, 1.0));

    for (int k = 0; k < K; ++k) {
        // Peek at the batch column sum to decide activity; the subgraph is
        // only built over live components.
        double colsum = 0.0;
        for (int i = 0; i < N; ++i) colsum += Y->value.at(i, k);
        if (colsum <= 0.0) continue;
        out.active[static_cast<std::size_t>(k)] = true;

        ad::NodePtr yk = ad::slice_cols(Y, k, k + 1);      // [N,1]
        ad::NodePtr sk = ad::sum(yk);                      // scalar
        ad::NodePtr phi_k = ad::scale(sk, 1.0 / N);        // scalar
        ad::NodePtr mu_k = ad::div(ad::matmul(ad::transpose(yk), H), sk); // [1,d_h]

        ad::NodePtr centered = ad::sub(H, ad::matmul(ad::constant(Tensor::full({N, 1}, 1.0)),
                                                     mu_k)); // [N,d_h]
        ad::NodePtr weighted = ad::scale_rows(centered, yk);
        ad::NodePtr scatter = ad::div(ad::matmul(ad::transpose(centered), weighted), sk);
        ad::NodePtr sym = ad::scale(ad::add(scatter, ad::transpose(scatter)), 0.5);
        ad::NodePtr sigma_k = ad::add(sym, eps_eye);

        // Quadratic forms via SPD solve; log-determinant from the factor.
        ad::NodePtr solved = ad::spd_solve(sigma_k, ad::transpose(centered)); // [d_h,N]
        ad::NodePtr quad = ad::row_sum(ad::mul(centered, ad::transpose(solved))); // [N,1]
        ad::NodePtr logdet = ad::logdet_spd(sigma_k);
        ad::NodePtr const_term =
            ad::add(ad::log_(phi_k),
                    ad::scale(ad::add_const(logdet, d_h * kLog2Pi), -0.5)); // scalar
        log_density_cols.push_back(ad::add(ad::scale(quad, -0.5), const_term)); // [N,1]

        ad::NodePtr pen_k = ad::sum(ad::div(ones_diag, ad::diag_part(sigma_k)));
        penalty = penalty ? ad::add(penalty, pen_k) : pen_k;
    }

    if (log_density_cols.empty())
        throw NumericError("gmm terms: every mixture component is inactive");

    ad::NodePtr log_density = log_density_cols.size() == 1
                                  ? log_density_cols[0]
                                  : ad::concat_cols(log_density_cols); // [N, K_active]
    out.energies = ad::neg(ad::logsumexp_rows(log_density));           // [N,1]
    out.penalty = penalty;
    return out;
}

} // namespace mlad
