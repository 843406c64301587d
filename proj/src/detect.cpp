#include "mlad/detect.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "mlad/error.hpp"

namespace mlad {

std::vector<ScoredWindow> score(const std::vector<Window>& windows, const TrainedModel& model,
                                const EmbeddingTable& table, bool dump_h) {
    std::vector<ScoredWindow> out;
    out.reserve(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const Window& w = windows[i];
        const WindowCode code = encode_window(build_matrix(w, table), model.enc, model.cfg);
        ScoredWindow s;
        s.index = i;
        s.origin = w.origin;
        s.session_id = w.session_id;
        s.label = w.label;
        s.energy = energy(code.h, model.stats);
        s.recon_error = code.recon_error;
        if (dump_h) s.h = code.h;
        out.push_back(std::move(s));
    }
    return out;
}

double apply_threshold(std::vector<ScoredWindow>& scored, const ThresholdPolicy& policy,
                       const std::vector<double>& train_energy_quantiles, ScoreKind kind) {
    if (scored.empty()) throw DataError("threshold: empty score list");
    auto value_of = [kind](const ScoredWindow& s) {
        return kind == ScoreKind::Energy ? s.energy : s.recon_error;
    };

    double threshold = 0.0;
    if (policy.mode == ThresholdMode::TrainQuantile) {
        if (train_energy_quantiles.empty())
            throw DataError("train_quantile policy requires training energies");
        if (policy.q < 0.0 || policy.q > 1.0)
            throw DataError("train_quantile: q must be in [0,1]");
        // The grid holds 1001 interpolated quantiles at q = i/1000.
        const double pos = policy.q * static_cast<double>(train_energy_quantiles.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, train_energy_quantiles.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        threshold = train_energy_quantiles[lo] * (1.0 - frac) + train_energy_quantiles[hi] * frac;
        for (auto& s : scored) s.verdict = value_of(s) > threshold ? 1 : 0;
        return threshold;
    }

    if (policy.rho <= 0.0 || policy.rho >= 1.0)
        throw DataError("contamination: rho must be in (0,1)");
    const std::size_t n_flag = static_cast<std::size_t>(
        std::ceil(policy.rho * static_cast<double>(scored.size())));
    std::vector<std::size_t> idx(scored.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return value_of(scored[a]) > value_of(scored[b]);
    });
    for (auto& s : scored) s.verdict = 0;
    for (std::size_t r = 0; r < n_flag && r < idx.size(); ++r) {
        scored[idx[r]].verdict = 1;
    }
    threshold = n_flag > 0 && n_flag <= idx.size() ? value_of(scored[idx[n_flag - 1]]) : 0.0;
    return threshold;
}

void save_scores_csv(const std::vector<ScoredWindow>& scored, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open " + path + " for writing");
    const std::size_t d_h = scored.empty() ? 0 : scored.front().h.size();
    os << "origin,session_id,label,energy,recon_error,verdict";
    for (std::size_t j = 0; j < d_h; ++j) os << ",h" << j;
    os << "\n";
    char buf[64];
    for (const auto& s : scored) {
        os << s.origin << ',' << s.session_id << ',' << s.label << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", s.energy);
        os << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", s.recon_error);
        os << buf << ',' << s.verdict;
        for (double v : s.h) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            os << ',' << buf;
        }
        os << '\n';
    }
}

} // namespace mlad
