#pragma once

#include <string>
#include <vector>

#include "mlad/dataset.hpp"
#include "mlad/embed.hpp"
#include "mlad/encoder.hpp"
#include "mlad/gmm.hpp"

namespace mlad {

struct TrainConfig {
    ModelConfig model;
    double lambda1 = 0.1;
    double lambda2 = -0.005; // negative by default: small covariance diagonals
                             // are rewarded rather than penalized (see README)
    double lr = 0.001;
    int batch = 512;
    int epochs = 30;
    double clip_norm = 5.0;

    void validate() const;
};

// Key=value config file covering TrainConfig and ModelConfig fields;
// unknown keys are rejected. CLI flags override file values.
TrainConfig load_train_config(const std::string& path);
void apply_config_line(TrainConfig& cfg, const std::string& key, const std::string& value);

struct LossTerms {
    ad::NodePtr total;
    ad::NodePtr recon;   // mean reconstruction error over the batch
    ad::NodePtr energy;  // mean sample energy (before lambda1)
    ad::NodePtr penalty; // covariance penalty (before lambda2)
};

// Builds Loss = mean(recon_error) + lambda1 * mean(energy) + lambda2 * P(Sigma)
// over a batch of normal windows. Throws ContractError if the batch contains
// an anomalous window, NumericError (naming the term) when a term goes
// non-finite.
LossTerms build_loss(const std::vector<const Window*>& batch, const EmbeddingTable& table,
                     const EncoderParams& enc, const MembershipHead& head,
                     const TrainConfig& cfg, Rng& rng, bool train_mode = true);

struct EpochStats {
    int epoch = 0;
    double mean_total = 0.0;
    double mean_recon = 0.0;
    double mean_energy = 0.0;
    double mean_penalty = 0.0;
    double seconds = 0.0;
};

struct TrainReport {
    std::vector<EpochStats> epochs;
    std::string checkpoint_path;

    void save_file(const std::string& path) const;
};

struct TrainedModel {
    ModelConfig cfg;
    EncoderParams enc;
    MembershipHead head;
    GmmStats stats;
    // 1001-point empirical quantile grid of training energies (q = i/1000),
    // used by the train_quantile threshold policy.
    std::vector<double> train_energy_quantiles;
};

struct TrainResult {
    TrainedModel model;
    TrainReport report;
};

// Joint training of encoder + membership head with adaptive-moment gradient
// descent, followed by freezing mixture statistics over the full training
// set with dropout off.
TrainResult train(const std::vector<Window>& windows, const EmbeddingTable& table,
                  const TrainConfig& cfg);

// Eval-mode codes for a set of windows (no gradients kept).
std::vector<WindowCode> encode_all(const std::vector<const Window*>& windows,
                                   const EmbeddingTable& table, const EncoderParams& enc,
                                   const ModelConfig& cfg);

// Empirical quantile with linear interpolation; q in [0,1], values need not
// be sorted.
double quantile(std::vector<double> values, double q);

} // namespace mlad
