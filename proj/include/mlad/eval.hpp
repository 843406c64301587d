#pragma once

#include <map>
#include <string>
#include <vector>

#include "mlad/dataset.hpp"
#include "mlad/detect.hpp"
#include "mlad/trainer.hpp"

namespace mlad {

struct Metrics {
    long tp = 0, fp = 0, fn = 0, tn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    // Zero-denominator cases report 0 with a flag instead of NaN.
    bool degenerate_precision = false;
    bool degenerate_recall = false;
};

Metrics metrics(const std::vector<int>& verdicts, const std::vector<int>& labels);

enum class ExperimentKind { Single, Fused, Transfer, Ablation, AlphaSweep };

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::Single;
    std::vector<std::string> train_sets;
    std::vector<std::string> test_sets;
    bool no_entmax = false; // softmax substitution (alpha forced to 1)
    bool no_gmm = false;    // lambda1 = lambda2 = 0, scoring by recon error
    std::vector<double> alpha_grid;
};

// Records (dataset, phase) window-read counts so protocols can prove which
// data a phase touched (e.g. zero target reads while training a transfer).
class AccessLog {
public:
    void note(const std::string& dataset, const std::string& phase, std::size_t n) {
        counts_[{dataset, phase}] += n;
    }
    std::size_t count(const std::string& dataset, const std::string& phase) const {
        auto it = counts_.find({dataset, phase});
        return it == counts_.end() ? 0 : it->second;
    }

private:
    std::map<std::pair<std::string, std::string>, std::size_t> counts_;
};

struct ReportRow {
    std::string experiment;
    std::string train_set;
    std::string test_set;
    double alpha = 0.0;
    std::string ablation; // "none", "no_entmax" or "no_gmm"
    Metrics m;
    double threshold = 0.0;
    std::uint64_t seed = 0;
};

struct EvalOptions {
    TrainConfig train;
    // Policy for test verdicts; rho_from_labels replaces rho with the scored
    // set's true anomaly fraction (the balanced-test protocol).
    ThresholdPolicy policy{ThresholdMode::Contamination, 0.99, 0.5};
    bool rho_from_labels = true;
    std::string scores_csv_prefix; // when set, each run writes its score CSV
    bool dump_h = false;
};

struct ExperimentResult {
    std::vector<ReportRow> rows;
    AccessLog access;
};

// Runs the requested protocol over prepared (unsplit) datasets:
//   single:      split one dataset, train on its normal windows, score its test
//   fused:       fuse train_sets, then proceed as single
//   transfer:    train on the first train set, score the test split of the
//                (disjoint) test set; the access log proves the target was
//                never read during training
//   ablation:    single with no_entmax (alpha=1) and/or no_gmm variants
//   alpha_sweep: one single run per grid alpha
ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::map<std::string, PreparedDataset>& data,
                                const EvalOptions& opts);

// CSV: experiment, train_set, test_set, alpha, ablation, precision, recall,
// f1, threshold, seed.
void save_report_csv(const std::vector<ReportRow>& rows, const std::string& path);

} // namespace mlad
