#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlad/graph.hpp"
#include "mlad/rng.hpp"
#include "mlad/tensor.hpp"

namespace mlad {

enum class ReconTarget { Pooled, PerPosition };

// Shared model hyperparameters; trainer-specific knobs live in TrainConfig.
struct ModelConfig {
    int d = 100;     // embedding dimension
    int d_h = 16;    // pooled code dimension fed to the mixture head
    int d_ff = 0;    // feed-forward width; 0 means 4*d
    int heads = 1;   // must divide d
    int layers = 1;
    int K = 4;       // mixture components
    double alpha = 1.5;            // attention entmax exponent
    double alpha_membership = 0.0; // 0 means reuse alpha
    double dropout = 0.5;
    double epsilon = 1e-6; // covariance diagonal regularizer
    ReconTarget recon_target = ReconTarget::Pooled;
    bool positional = false; // optional sinusoidal position encoding
    std::uint64_t seed = 1;

    int ffn_width() const { return d_ff > 0 ? d_ff : 4 * d; }
    double membership_alpha() const { return alpha_membership > 0.0 ? alpha_membership : alpha; }
    void validate() const;
};

struct LayerParams {
    ad::NodePtr W_q, W_k, W_v;
    ad::NodePtr ln1_gain, ln1_bias;
    ad::NodePtr W_1, b_1, W_2, b_2;
    ad::NodePtr ln2_gain, ln2_bias;
};

struct EncoderParams {
    std::vector<LayerParams> layers;
    ad::NodePtr W_p, b_p; // pooling projection d -> d_h
    ad::NodePtr W_r, b_r; // reconstruction head d_h -> d

    static EncoderParams init(const ModelConfig& cfg, Rng& rng);
    // Every parameter node, fixed order, stable names.
    std::vector<ad::NodePtr> all() const;
};

struct EncodeContext {
    bool train = false;
    Rng* rng = nullptr; // required when train is true and dropout > 0
};

struct EncodeResult {
    ad::NodePtr h;           // [1, d_h] pooled window code
    ad::NodePtr recon;       // [1, d] reconstructed pooled input
    ad::NodePtr recon_error; // scalar: ||recon - pooled input||^2 / d
                             // (mean over positions in per-position mode)
};

struct AttentionResult {
    ad::NodePtr output;                   // [l, d]
    std::vector<ad::NodePtr> weights;     // per head, [l, l] rows on the simplex
};

// Entmax self-attention sublayer: per head, scores = Q K^T / sqrt(d/H) pass
// through alpha-entmax row-wise; dropout hits the weights in train mode.
AttentionResult attention(const ad::NodePtr& x, const LayerParams& lp, const ModelConfig& cfg,
                          const EncodeContext& ctx);

// Position-wise CeLU feed-forward sublayer; dropout after the activation in
// train mode.
ad::NodePtr ffn(const ad::NodePtr& x, const LayerParams& lp, const ModelConfig& cfg,
                const EncodeContext& ctx);

// Runs the post-norm residual encoder stack over a window matrix T [l, d]:
// entmax self-attention, position-wise FFN with CeLU, normalization and
// dropout, then mean pooling, projection to d_h and reconstruction.
EncodeResult encode(const Tensor& T, const EncoderParams& params, const ModelConfig& cfg,
                    const EncodeContext& ctx);

// Plain convenience values extracted from an eval-mode encode.
struct WindowCode {
    std::vector<double> h;
    std::vector<double> recon;
    double recon_error = 0.0;
};

WindowCode encode_window(const Tensor& T, const EncoderParams& params, const ModelConfig& cfg);

} // namespace mlad
