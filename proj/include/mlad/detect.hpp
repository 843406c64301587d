#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mlad/dataset.hpp"
#include "mlad/embed.hpp"
#include "mlad/trainer.hpp"

namespace mlad {

struct ScoredWindow {
    std::size_t index = 0; // position in the scored batch
    std::string origin;
    std::string session_id;
    int label = 0;
    double energy = 0.0;
    double recon_error = 0.0;
    int verdict = 0; // set by apply_threshold
    std::vector<double> h; // filled when dump_h is requested
};

enum class ThresholdMode { TrainQuantile, Contamination };

struct ThresholdPolicy {
    ThresholdMode mode = ThresholdMode::TrainQuantile;
    double q = 0.99;  // train_quantile: threshold at this training-energy quantile
    double rho = 0.5; // contamination: flag exactly ceil(rho*N) highest scores
};

enum class ScoreKind { Energy, ReconError };

// Energy and reconstruction error per window under a frozen model;
// deterministic, order-preserving.
std::vector<ScoredWindow> score(const std::vector<Window>& windows, const TrainedModel& model,
                                const EmbeddingTable& table, bool dump_h = false);

// Assigns verdicts. Returns the threshold used. train_quantile reads the
// model's stored training-energy quantile grid; contamination flags exactly
// ceil(rho*N) windows, ties broken by stable input order.
double apply_threshold(std::vector<ScoredWindow>& scored, const ThresholdPolicy& policy,
                       const std::vector<double>& train_energy_quantiles,
                       ScoreKind kind = ScoreKind::Energy);

// CSV: origin, session_id, label, energy, recon_error, verdict
// (+ h0..h{d_h-1} when codes were dumped).
void save_scores_csv(const std::vector<ScoredWindow>& scored, const std::string& path);

} // namespace mlad
