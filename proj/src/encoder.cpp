#include "mlad/encoder.hpp"

#include <cmath>

#include "mlad/error.hpp"

namespace mlad {

using ad::NodePtr;

void ModelConfig::validate() const {
    if (d < 1) throw DataError("model: d must be positive");
    if (d_h < 1) throw DataError("model: d_h must be positive");
    if (heads < 1 || d % heads != 0)
        throw DataError("model: heads must divide d (d=" + std::to_string(d) +
                        ", heads=" + std::to_string(heads) + ")");
    if (layers < 1) throw DataError("model: layers must be positive");
    if (K < 1 || K > 16) throw DataError("model: K must be in 1..16");
    if (alpha < 1.0 || alpha > 2.0) throw DataError("model: alpha must be in [1,2]");
    if (alpha_membership != 0.0 && (alpha_membership < 1.0 || alpha_membership > 2.0))
        throw DataError("model: membership alpha must be in [1,2]");
    if (dropout < 0.0 || dropout >= 1.0) throw DataError("model: dropout must be in [0,1)");
    if (epsilon <= 0.0) throw DataError("model: epsilon must be positive");
}

namespace {

Tensor uniform_fan_in(int rows, int cols, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(rows));
    Tensor t = Tensor::zeros({rows, cols});
    for (double& v : t.data()) v = rng.uniform(-bound, bound);
    return t;
}

NodePtr weight(const std::string& name, int rows, int cols, Rng& rng) {
    return ad::leaf(uniform_fan_in(rows, cols, rng), name);
}

NodePtr zeros_param(const std::string& name, int cols) {
    return ad::leaf(Tensor::zeros({1, cols}), name);
}

NodePtr ones_param(const std::string& name, int cols) {
    return ad::leaf(Tensor::full({1, cols}, 1.0), name);
}

// Classic sinusoidal position encoding, added to T when enabled.
Tensor positional_encoding(int l, int d) {
    Tensor pe = Tensor::zeros({l, d});
    for (int pos = 0; pos < l; ++pos) {
        for (int j = 0; j < d; ++j) {
            const double rate = std::pow(10000.0, -2.0 * (j / 2) / static_cast<double>(d));
            pe.at(pos, j) = (j % 2 == 0) ? std::sin(pos * rate) : std::cos(pos * rate);
        }
    }
    return pe;
}

} // namespace

EncoderParams EncoderParams::init(const ModelConfig& cfg, Rng& rng) {
    cfg.validate();
    EncoderParams p;
    const int d = cfg.d;
    const int ff = cfg.ffn_width();
    for (int l = 0; l < cfg.layers; ++l) {
        const std::string base = "layer" + std::to_string(l) + ".";
        LayerParams lp;
        lp.W_q = weight(base + "W_q", d, d, rng);
        lp.W_k = weight(base + "W_k", d, d, rng);
        lp.W_v = weight(base + "W_v", d, d, rng);
        lp.ln1_gain = ones_param(base + "ln1_gain", d);
        lp.ln1_bias = zeros_param(base + "ln1_bias", d);
        lp.W_1 = weight(base + "W_1", d, ff, rng);
        lp.b_1 = zeros_param(base + "b_1", ff);
        lp.W_2 = weight(base + "W_2", ff, d, rng);
        lp.b_2 = zeros_param(base + "b_2", d);
        lp.ln2_gain = ones_param(base + "ln2_gain", d);
        lp.ln2_bias = zeros_param(base + "ln2_bias", d);
        p.layers.push_back(std::move(lp));
    }
    p.W_p = weight("W_p", d, cfg.d_h, rng);
    p.b_p = zeros_param("b_p", cfg.d_h);
    p.W_r = weight("W_r", cfg.d_h, d, rng);
    p.b_r = zeros_param("b_r", d);
    return p;
}

std::vector<NodePtr> EncoderParams::all() const {
    std::vector<NodePtr> out;
    for (const auto& lp : layers) {
        out.insert(out.end(), {lp.W_q, lp.W_k, lp.W_v, lp.ln1_gain, lp.ln1_bias, lp.W_1,
                               lp.b_1, lp.W_2, lp.b_2, lp.ln2_gain, lp.ln2_bias});
    }
    out.insert(out.end(), {W_p, b_p, W_r, b_r});
    return out;
}

AttentionResult attention(const NodePtr& x, const LayerParams& lp, const ModelConfig& cfg,
                          const EncodeContext& ctx) {
    const int d = cfg.d;
    const int hw = d / cfg.heads; // per-head width
    NodePtr q = ad::matmul(x, lp.W_q);
    NodePtr k = ad::matmul(x, lp.W_k);
    NodePtr v = ad::matmul(x, lp.W_v);
    EntmaxConfig ecfg;
    ecfg.alpha = cfg.alpha;
    AttentionResult res;
    std::vector<NodePtr> heads;
    for (int h = 0; h < cfg.heads; ++h) {
        const int c0 = h * hw;
        const int c1 = c0 + hw;
        NodePtr qh = cfg.heads == 1 ? q : ad::slice_cols(q, c0, c1);
        NodePtr kh = cfg.heads == 1 ? k : ad::slice_cols(k, c0, c1);
        NodePtr vh = cfg.heads == 1 ? v : ad::slice_cols(v, c0, c1);
        NodePtr scores = ad::scale(ad::matmul(qh, ad::transpose(kh)),
                                   1.0 / std::sqrt(static_cast<double>(hw)));
        NodePtr weights = ad::entmax_rows(scores, ecfg);
        res.weights.push_back(weights);
        if (ctx.train && cfg.dropout > 0.0) {
            weights = ad::dropout(weights, cfg.dropout, *ctx.rng, true);
        }
        heads.push_back(ad::matmul(weights, vh));
    }
    res.output = cfg.heads == 1 ? heads[0] : ad::concat_cols(heads);
    return res;
}

NodePtr ffn(const NodePtr& x, const LayerParams& lp, const ModelConfig& cfg,
            const EncodeContext& ctx) {
    NodePtr mid = ad::celu(ad::add_rowvec(ad::matmul(x, lp.W_1), lp.b_1));
    if (ctx.train && cfg.dropout > 0.0) {
        mid = ad::dropout(mid, cfg.dropout, *ctx.rng, true);
    }
    return ad::add_rowvec(ad::matmul(mid, lp.W_2), lp.b_2);
}

EncodeResult encode(const Tensor& T, const EncoderParams& params, const ModelConfig& cfg,
                    const EncodeContext& ctx) {
    if (T.rank() != 2 || T.cols() != cfg.d)
        throw DimensionError("encode: window matrix shape " + T.shape_string() +
                             " does not match d=" + std::to_string(cfg.d));
    if (ctx.train && cfg.dropout > 0.0 && ctx.rng == nullptr)
        throw ContractError("encode: training mode with dropout requires an rng");

    NodePtr input = ad::constant(T);
    NodePtr x = input;
    if (cfg.positional) {
        x = ad::add(x, ad::constant(positional_encoding(T.rows(), cfg.d)));
    }
    for (const auto& lp : params.layers) {
        x = ad::layer_norm(ad::add(x, attention(x, lp, cfg, ctx).output), lp.ln1_gain,
                           lp.ln1_bias);
        x = ad::layer_norm(ad::add(x, ffn(x, lp, cfg, ctx)), lp.ln2_gain, lp.ln2_bias);
    }

    EncodeResult res;
    NodePtr pooled = ad::mean_over_rows(x); // [1, d]
    res.h = ad::add(ad::matmul(pooled, params.W_p), params.b_p);

    NodePtr target_pooled = ad::mean_over_rows(input);
    res.recon = ad::add(ad::matmul(res.h, params.W_r), params.b_r);
    if (cfg.recon_target == ReconTarget::Pooled) {
        NodePtr diff = ad::sub(res.recon, target_pooled);
        res.recon_error = ad::scale(ad::sum(ad::mul(diff, diff)), 1.0 / cfg.d);
    } else {
        // Reconstruct every input row from its own position code.
        NodePtr codes = ad::add_rowvec(ad::matmul(x, params.W_p), params.b_p);
        NodePtr recons = ad::add_rowvec(ad::matmul(codes, params.W_r), params.b_r);
        NodePtr diff = ad::sub(recons, input);
        res.recon_error =
            ad::scale(ad::sum(ad::mul(diff, diff)), 1.0 / (static_cast<double>(T.rows()) * cfg.d));
    }
    return res;
}

WindowCode encode_window(const Tensor& T, const EncoderParams& params, const ModelConfig& cfg) {
    EncodeContext ctx; // eval mode
    const EncodeResult res = encode(T, params, cfg, ctx);
    WindowCode code;
    code.h.assign(res.h->value.data().begin(), res.h->value.data().end());
    code.recon.assign(res.recon->value.data().begin(), res.recon->value.data().end());
    code.recon_error = res.recon_error->value.data()[0];
    return code;
}

} // namespace mlad
