#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mlad/encoder.hpp"
#include "mlad/error.hpp"
#include "mlad/gradcheck.hpp"
#include "mlad/rng.hpp"

using namespace mlad;

namespace {

Tensor random_tensor(std::vector<int> shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
    Tensor t = Tensor::zeros(std::move(shape));
    for (auto& v : t.data()) v = rng.uniform(lo, hi);
    return t;
}

void fill(ad::NodePtr& p, const Tensor& t) { p->value = t; }

ModelConfig tiny_config(int d = 4, int d_h = 4) {
    ModelConfig cfg;
    cfg.d = d;
    cfg.d_h = d_h;
    cfg.d_ff = 2 * d;
    cfg.K = 2;
    cfg.dropout = 0.0;
    cfg.seed = 3;
    return cfg;
}

// Independent row-wise normalization for the closed-form checks.
Tensor layer_norm_oracle(const Tensor& x, double eps = 1e-5) {
    Tensor out = Tensor::zeros(x.shape());
    for (int i = 0; i < x.rows(); ++i) {
        double mean = 0.0;
        for (double v : x.row(i)) mean += v;
        mean /= x.cols();
        double var = 0.0;
        for (double v : x.row(i)) var += (v - mean) * (v - mean);
        var /= x.cols();
        for (int j = 0; j < x.cols(); ++j) {
            out.at(i, j) = (x.at(i, j) - mean) / std::sqrt(var + eps);
        }
    }
    return out;
}

} // namespace

TEST_CASE("zero query/key weights give uniform attention") {
    ModelConfig cfg = tiny_config();
    Rng rng(1);
    EncoderParams params = EncoderParams::init(cfg, rng);
    auto& lp = params.layers[0];
    fill(lp.W_q, Tensor::zeros({4, 4}));
    fill(lp.W_k, Tensor::zeros({4, 4}));
    fill(lp.W_v, Tensor::eye(4)); // V = x

    const Tensor x = random_tensor({5, 4}, rng);
    EncodeContext ctx;
    const AttentionResult res = attention(ad::constant(x), lp, cfg, ctx);

    // Uniform weights.
    for (const auto& wnode : res.weights) {
        for (double w : wnode->value.data()) CHECK(w == doctest::Approx(0.2).epsilon(1e-9));
    }
    // Each output row is the column mean of V.
    for (int j = 0; j < 4; ++j) {
        double mean = 0.0;
        for (int i = 0; i < 5; ++i) mean += x.at(i, j);
        mean /= 5.0;
        for (int i = 0; i < 5; ++i) {
            CHECK(res.output->value.at(i, j) == doctest::Approx(mean).epsilon(1e-9));
        }
    }
}

TEST_CASE("single-position window attends to itself") {
    ModelConfig cfg = tiny_config();
    Rng rng(2);
    EncoderParams params = EncoderParams::init(cfg, rng);
    fill(params.layers[0].W_v, Tensor::eye(4));
    const Tensor x = random_tensor({1, 4}, rng);
    EncodeContext ctx;
    const AttentionResult res = attention(ad::constant(x), params.layers[0], cfg, ctx);
    CHECK(res.weights[0]->value.numel() == 1);
    CHECK(res.weights[0]->value.data()[0] == doctest::Approx(1.0));
    for (int j = 0; j < 4; ++j) {
        CHECK(res.output->value.at(0, j) == doctest::Approx(x.at(0, j)));
    }
}

TEST_CASE("attention weight rows stay on the simplex over random draws") {
    ModelConfig cfg = tiny_config(8, 4);
    cfg.heads = 2;
    Rng rng(3);
    EncoderParams params = EncoderParams::init(cfg, rng);
    EncodeContext ctx;
    for (int trial = 0; trial < 100; ++trial) {
        const Tensor x = random_tensor({6, 8}, rng, -2.0, 2.0);
        const AttentionResult res = attention(ad::constant(x), params.layers[0], cfg, ctx);
        REQUIRE(res.weights.size() == 2);
        for (const auto& wnode : res.weights) {
            for (int i = 0; i < 6; ++i) {
                double sum = 0.0;
                for (double w : wnode->value.row(i)) {
                    CHECK(w >= 0.0);
                    sum += w;
                }
                CHECK(std::abs(sum - 1.0) <= 1e-8);
            }
        }
    }
}

TEST_CASE("feed-forward matches its formula on zero dropout") {
    ModelConfig cfg = tiny_config();
    Rng rng(4);
    EncoderParams params = EncoderParams::init(cfg, rng);
    const auto& lp = params.layers[0];
    const Tensor x = random_tensor({3, 4}, rng);
    EncodeContext ctx;
    const Tensor got = ffn(ad::constant(x), lp, cfg, ctx)->value;

    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 4; ++j) {
            double acc = lp.b_2->value.data()[static_cast<std::size_t>(j)];
            for (int m = 0; m < cfg.ffn_width(); ++m) {
                double mid = lp.b_1->value.data()[static_cast<std::size_t>(m)];
                for (int q = 0; q < 4; ++q) mid += x.at(i, q) * lp.W_1->value.at(q, m);
                const double act = mid >= 0.0 ? mid : std::exp(mid) - 1.0;
                acc += act * lp.W_2->value.at(m, j);
            }
            CHECK(got.at(i, j) == doctest::Approx(acc).epsilon(1e-10));
        }
    }
}

TEST_CASE("zeroed residual branches reduce encode to the normalization path") {
    ModelConfig cfg = tiny_config(4, 4);
    Rng rng(5);
    EncoderParams params = EncoderParams::init(cfg, rng);
    auto& lp = params.layers[0];
    fill(lp.W_v, Tensor::zeros({4, 4}));
    fill(lp.W_2, Tensor::zeros({8, 4}));
    fill(params.W_p, Tensor::eye(4));
    fill(params.W_r, Tensor::eye(4));

    const Tensor T = random_tensor({6, 4}, rng);
    EncodeContext ctx;
    const EncodeResult res = encode(T, params, cfg, ctx);

    // With both residual branches zeroed, x = LN(LN(T)).
    const Tensor expected = layer_norm_oracle(layer_norm_oracle(T));
    Tensor pooled = Tensor::zeros({1, 4});
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 4; ++j) pooled.data()[static_cast<std::size_t>(j)] +=
            expected.at(i, j) / 6.0;
    }
    for (int j = 0; j < 4; ++j) {
        CHECK(res.h->value.data()[static_cast<std::size_t>(j)] ==
              doctest::Approx(pooled.data()[static_cast<std::size_t>(j)]).epsilon(1e-9));
    }

    double err = 0.0;
    for (int j = 0; j < 4; ++j) {
        double target = 0.0;
        for (int i = 0; i < 6; ++i) target += T.at(i, j) / 6.0;
        const double diff = pooled.data()[static_cast<std::size_t>(j)] - target;
        err += diff * diff;
    }
    err /= 4.0;
    CHECK(res.recon_error->value.data()[0] == doctest::Approx(err).epsilon(1e-9));
}

TEST_CASE("window row permutations leave h unchanged") {
    ModelConfig cfg = tiny_config(6, 3);
    Rng rng(6);
    EncoderParams params = EncoderParams::init(cfg, rng);
    const Tensor T = random_tensor({7, 6}, rng);
    EncodeContext ctx;
    const auto base = encode(T, params, cfg, ctx).h->value;

    Rng perm_rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> perm(7);
        for (int i = 0; i < 7; ++i) perm[static_cast<std::size_t>(i)] = i;
        perm_rng.shuffle(perm);
        Tensor P = Tensor::zeros({7, 6});
        for (int i = 0; i < 7; ++i) {
            for (int j = 0; j < 6; ++j) P.at(i, j) = T.at(perm[static_cast<std::size_t>(i)], j);
        }
        const auto permuted = encode(P, params, cfg, ctx).h->value;
        for (std::size_t k = 0; k < base.numel(); ++k) {
            CHECK(permuted.data()[k] == doctest::Approx(base.data()[k]).epsilon(1e-9));
        }
    }
}

TEST_CASE("positional encoding breaks permutation invariance when enabled") {
    ModelConfig cfg = tiny_config(6, 3);
    cfg.positional = true;
    Rng rng(6);
    EncoderParams params = EncoderParams::init(cfg, rng);
    const Tensor T = random_tensor({5, 6}, rng);
    Tensor R = Tensor::zeros({5, 6});
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 6; ++j) R.at(i, j) = T.at(4 - i, j);
    }
    EncodeContext ctx;
    const auto a = encode(T, params, cfg, ctx).h->value;
    const auto b = encode(R, params, cfg, ctx).h->value;
    double diff = 0.0;
    for (std::size_t k = 0; k < a.numel(); ++k) diff += std::abs(a.data()[k] - b.data()[k]);
    CHECK(diff > 1e-6);
}

TEST_CASE("shape contract: l=20, d=100, d_h=16") {
    ModelConfig cfg;
    cfg.d = 100;
    cfg.d_h = 16;
    cfg.dropout = 0.0;
    Rng rng(7);
    EncoderParams params = EncoderParams::init(cfg, rng);
    const Tensor T = random_tensor({20, 100}, rng);
    EncodeContext ctx;
    const EncodeResult res = encode(T, params, cfg, ctx);
    CHECK(res.h->value.shape() == std::vector<int>{1, 16});
    CHECK(res.recon->value.shape() == std::vector<int>{1, 100});
    CHECK(res.recon_error->value.rank() == 0);

    CHECK_THROWS_AS(encode(random_tensor({4, 32}, rng), params, cfg, ctx), DimensionError);
}

TEST_CASE("eval-mode encode is deterministic; dropout changes training passes") {
    ModelConfig cfg = tiny_config();
    cfg.dropout = 0.5;
    Rng rng(8);
    EncoderParams params = EncoderParams::init(cfg, rng);
    const Tensor T = random_tensor({5, 4}, rng);

    EncodeContext ev;
    const auto a = encode(T, params, cfg, ev).h->value;
    const auto b = encode(T, params, cfg, ev).h->value;
    for (std::size_t k = 0; k < a.numel(); ++k) CHECK(a.data()[k] == b.data()[k]);

    Rng drop_rng(123);
    EncodeContext tr;
    tr.train = true;
    tr.rng = &drop_rng;
    const auto c = encode(T, params, cfg, tr).h->value;
    const auto d = encode(T, params, cfg, tr).h->value;
    double diff = 0.0;
    for (std::size_t k = 0; k < c.numel(); ++k) diff += std::abs(c.data()[k] - d.data()[k]);
    CHECK(diff > 0.0);
}

TEST_CASE("encoder parameters pass the gradient check on a tiny config") {
    ModelConfig cfg = tiny_config(4, 3);
    cfg.heads = 2;
    Rng rng(9);
    EncoderParams params = EncoderParams::init(cfg, rng);
    const Tensor T = random_tensor({5, 4}, rng);
    EncodeContext ctx;

    const auto f = [&] {
        const EncodeResult res = encode(T, params, cfg, ctx);
        return ad::add(ad::sum(res.h), res.recon_error);
    };
    CHECK(ad::grad_check(f, params.all(), 1e-5) < 1e-5);
}
