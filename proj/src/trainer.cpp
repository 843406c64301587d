#include "mlad/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mlad/error.hpp"
#include "mlad/kernels.hpp"

namespace mlad {

void TrainConfig::validate() const {
    model.validate();
    if (lr <= 0.0) throw DataError("train: learning rate must be positive");
    if (batch < 2) throw DataError("train: batch must be >= 2 (mixture estimation needs N >= 2)");
    if (epochs < 1) throw DataError("train: epochs must be positive");
    if (clip_norm <= 0.0) throw DataError("train: clip_norm must be positive");
}

void apply_config_line(TrainConfig& cfg, const std::string& key, const std::string& value) {
    auto as_int = [&] { return std::stoi(value); };
    auto as_double = [&] { return std::stod(value); };
    if (key == "d") cfg.model.d = as_int();
    else if (key == "d_h") cfg.model.d_h = as_int();
    else if (key == "d_ff") cfg.model.d_ff = as_int();
    else if (key == "heads") cfg.model.heads = as_int();
    else if (key == "layers") cfg.model.layers = as_int();
    else if (key == "K") cfg.model.K = as_int();
    else if (key == "alpha") cfg.model.alpha = as_double();
    else if (key == "alpha_membership") cfg.model.alpha_membership = as_double();
    else if (key == "dropout") cfg.model.dropout = as_double();
    else if (key == "epsilon") cfg.model.epsilon = as_double();
    else if (key == "seed") cfg.model.seed = std::stoull(value);
    else if (key == "positional") cfg.model.positional = as_int() != 0;
    else if (key == "recon_target") {
        if (value == "pooled") cfg.model.recon_target = ReconTarget::Pooled;
        else if (value == "per_position") cfg.model.recon_target = ReconTarget::PerPosition;
        else throw DataError("config: recon_target must be pooled or per_position");
    }
    else if (key == "lambda1") cfg.lambda1 = as_double();
    else if (key == "lambda2") cfg.lambda2 = as_double();
    else if (key == "lr") cfg.lr = as_double();
    else if (key == "batch") cfg.batch = as_int();
    else if (key == "epochs") cfg.epochs = as_int();
    else if (key == "clip_norm") cfg.clip_norm = as_double();
    else throw DataError("config: unknown key '" + key + "'");
}

TrainConfig load_train_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open config " + path);
    TrainConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError("config " + path + ": expected key=value at line " +
                            std::to_string(lineno));
        try {
            apply_config_line(cfg, line.substr(0, eq), line.substr(eq + 1));
        } catch (const std::invalid_argument&) {
            throw DataError("config " + path + ": bad value at line " + std::to_string(lineno));
        }
    }
    return cfg;
}

LossTerms build_loss(const std::vector<const Window*>& batch, const EmbeddingTable& table,
                     const EncoderParams& enc, const MembershipHead& head,
                     const TrainConfig& cfg, Rng& rng, bool train_mode) {
    if (batch.size() < 2) throw ContractError("loss: batch must hold at least 2 windows");
    for (const Window* w : batch) {
        if (w->label != 0)
            throw ContractError("loss: anomalous window in training batch (origin '" +
                                w->origin + "')");
    }

    EncodeContext ctx;
    ctx.train = train_mode;
    ctx.rng = &rng;

    LossTerms terms;
    std::vector<ad::NodePtr> h_rows;
    std::vector<ad::NodePtr> recon_errs;
    h_rows.reserve(batch.size());
    recon_errs.reserve(batch.size());
    try {
        for (const Window* w : batch) {
            const Tensor T = build_matrix(*w, table);
            EncodeResult res = encode(T, enc, cfg.model, ctx);
            h_rows.push_back(res.h);
            recon_errs.push_back(res.recon_error);
        }
        terms.recon = ad::scale(ad::sum(ad::stack_rows(recon_errs)),
                                1.0 / static_cast<double>(batch.size()));
    } catch (const NumericError& e) {
        throw NumericError(std::string("loss reconstruction term: ") + e.what());
    }

    try {
        ad::NodePtr H = ad::stack_rows(h_rows);                 // [N, d_h]
        ad::NodePtr Y = membership(H, head);                    // [N, K]
        GmmGraph gg = gmm_graph_terms(H, Y, cfg.model.epsilon);
        terms.energy = ad::scale(ad::sum(gg.energies), 1.0 / static_cast<double>(batch.size()));
        terms.penalty = gg.penalty;
    } catch (const NumericError& e) {
        throw NumericError(std::string("loss energy/penalty term: ") + e.what());
    }

    terms.total = ad::add(terms.recon, ad::add(ad::scale(terms.energy, cfg.lambda1),
                                               ad::scale(terms.penalty, cfg.lambda2)));
    return terms;
}

namespace {

// Adaptive-moment update with bias correction (decay 0.9/0.999, eps 1e-8).
struct MomentState {
    std::vector<Tensor> m;
    std::vector<Tensor> v;
    long t = 0;

    void init(const std::vector<ad::NodePtr>& params) {
        for (const auto& p : params) {
            m.push_back(Tensor::zeros(p->value.shape()));
            v.push_back(Tensor::zeros(p->value.shape()));
        }
    }

    void step(const std::vector<ad::NodePtr>& params, double lr, double clip_norm) {
        constexpr double b1 = 0.9;
        constexpr double b2 = 0.999;
        constexpr double eps = 1e-8;

        double norm2 = 0.0;
        for (const auto& p : params) {
            norm2 += kern::active().dot(p->grad.raw(), p->grad.raw(), p->grad.numel());
        }
        const double norm = std::sqrt(norm2);
        const double clip = norm > clip_norm ? clip_norm / norm : 1.0;

        ++t;
        const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
        const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto val = params[i]->value.data();
            auto grd = params[i]->grad.data();
            auto mm = m[i].data();
            auto vv = v[i].data();
            for (std::size_t j = 0; j < val.size(); ++j) {
                const double g = grd[j] * clip;
                mm[j] = b1 * mm[j] + (1.0 - b1) * g;
                vv[j] = b2 * vv[j] + (1.0 - b2) * g * g;
                const double mhat = mm[j] / c1;
                const double vhat = vv[j] / c2;
                val[j] -= lr * mhat / (std::sqrt(vhat) + eps);
            }
        }
    }
};

} // namespace

std::vector<WindowCode> encode_all(const std::vector<const Window*>& windows,
                                   const EmbeddingTable& table, const EncoderParams& enc,
                                   const ModelConfig& cfg) {
    std::vector<WindowCode> out;
    out.reserve(windows.size());
    for (const Window* w : windows) {
        out.push_back(encode_window(build_matrix(*w, table), enc, cfg));
    }
    return out;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw DataError("quantile: empty value list");
    if (q < 0.0 || q > 1.0) throw DataError("quantile: q must be in [0,1]");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

TrainResult train(const std::vector<Window>& windows, const EmbeddingTable& table,
                  const TrainConfig& cfg) {
    cfg.validate();
    if (windows.empty()) throw DataError("train: empty training set");
    if (static_cast<int>(table.dim) != cfg.model.d)
        throw DataError("train: embedding dim " + std::to_string(table.dim) +
                        " does not match model d=" + std::to_string(cfg.model.d));

    Rng rng(cfg.model.seed);
    TrainResult result;
    result.model.cfg = cfg.model;
    result.model.enc = EncoderParams::init(cfg.model, rng);
    result.model.head =
        MembershipHead::init(cfg.model.d_h, cfg.model.K, cfg.model.membership_alpha(), rng);

    std::vector<ad::NodePtr> params = result.model.enc.all();
    for (const auto& p : result.model.head.all()) params.push_back(p);

    MomentState opt;
    opt.init(params);

    std::vector<std::size_t> order(windows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        rng.shuffle(order);

        EpochStats stats;
        stats.epoch = epoch;
        std::size_t n_batches = 0;
        std::size_t start = 0;
        while (start < order.size()) {
            std::size_t end = std::min(start + static_cast<std::size_t>(cfg.batch), order.size());
            // A trailing chunk of one window cannot feed mixture estimation;
            // extend the previous batch instead.
            if (order.size() - end == 1) end = order.size();
            if (end - start < 2) break;

            std::vector<const Window*> batch;
            batch.reserve(end - start);
            for (std::size_t i = start; i < end; ++i) batch.push_back(&windows[order[i]]);

            LossTerms terms = build_loss(batch, table, result.model.enc, result.model.head,
                                         cfg, rng, true);
            ad::zero_grad(params);
            ad::backward(terms.total);
            opt.step(params, cfg.lr, cfg.clip_norm);

            stats.mean_total += terms.total->value.data()[0];
            stats.mean_recon += terms.recon->value.data()[0];
            stats.mean_energy += terms.energy->value.data()[0];
            stats.mean_penalty += terms.penalty->value.data()[0];
            ++n_batches;
            start = end;
        }
        if (n_batches == 0) throw DataError("train: training set too small for one batch");
        stats.mean_total /= static_cast<double>(n_batches);
        stats.mean_recon /= static_cast<double>(n_batches);
        stats.mean_energy /= static_cast<double>(n_batches);
        stats.mean_penalty /= static_cast<double>(n_batches);
        stats.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.report.epochs.push_back(stats);
    }

    // Freeze mixture statistics over the full training set, dropout off.
    const int N = static_cast<int>(windows.size());
    Tensor H = Tensor::zeros({N, cfg.model.d_h});
    Tensor Y = Tensor::zeros({N, cfg.model.K});
    for (int i = 0; i < N; ++i) {
        const WindowCode code = encode_window(
            build_matrix(windows[static_cast<std::size_t>(i)], table), result.model.enc,
            cfg.model);
        std::copy(code.h.begin(), code.h.end(), H.row(i).begin());
        const auto y = membership_plain(code.h, result.model.head.W_h->value,
                                        result.model.head.b->value,
                                        result.model.head.alpha);
        std::copy(y.begin(), y.end(), Y.row(i).begin());
    }
    result.model.stats = estimate(H, Y, cfg.model.epsilon);

    std::vector<double> energies(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        energies[static_cast<std::size_t>(i)] = energy(H.row(i), result.model.stats);
    }
    result.model.train_energy_quantiles.resize(1001);
    std::sort(energies.begin(), energies.end());
    for (int i = 0; i <= 1000; ++i) {
        const double pos = (i / 1000.0) * static_cast<double>(energies.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, energies.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        result.model.train_energy_quantiles[static_cast<std::size_t>(i)] =
            energies[lo] * (1.0 - frac) + energies[hi] * frac;
    }
    return result;
}

void TrainReport::save_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open " + path + " for writing");
    os << "#mlad-train-report 1\n";
    os << "epoch\tloss\trecon\tenergy\tpenalty\tseconds\n";
    char buf[512];
    for (const auto& e : epochs) {
        std::snprintf(buf, sizeof(buf), "%d\t%.17g\t%.17g\t%.17g\t%.17g\t%.3f\n", e.epoch,
                      e.mean_total, e.mean_recon, e.mean_energy, e.mean_penalty, e.seconds);
        os << buf;
    }
    os << "summary\tepochs=" << epochs.size() << "\tcheckpoint=" << checkpoint_path << "\n";
}

} // namespace mlad
