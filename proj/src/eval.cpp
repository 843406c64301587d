#include "mlad/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "mlad/error.hpp"

namespace mlad {

Metrics metrics(const std::vector<int>& verdicts, const std::vector<int>& labels) {
    if (verdicts.size() != labels.size())
        throw DataError("metrics: " + std::to_string(verdicts.size()) + " verdicts vs " +
                        std::to_string(labels.size()) + " labels");
    Metrics m;
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        const bool pred = verdicts[i] != 0;
        const bool truth = labels[i] != 0;
        if (pred && truth) ++m.tp;
        else if (pred && !truth) ++m.fp;
        else if (!pred && truth) ++m.fn;
        else ++m.tn;
    }
    if (m.tp + m.fp > 0) {
        m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
    } else {
        m.degenerate_precision = true;
    }
    if (m.tp + m.fn > 0) {
        m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    } else {
        m.degenerate_recall = true;
    }
    if (m.precision + m.recall > 0.0) {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
    return m;
}

namespace {

struct RunOutcome {
    Metrics overall;
    std::map<std::string, Metrics> per_origin;
    double threshold = 0.0;
};

Metrics metrics_of(const std::vector<ScoredWindow>& scored) {
    std::vector<int> verdicts;
    std::vector<int> labels;
    verdicts.reserve(scored.size());
    labels.reserve(scored.size());
    for (const auto& s : scored) {
        verdicts.push_back(s.verdict);
        labels.push_back(s.label);
    }
    return metrics(verdicts, labels);
}

// One train-on-source / score-on-target pass. Setting no_gmm drops the
// mixture terms from the objective and scores by reconstruction error.
RunOutcome run_once(const PreparedDataset& train_data, const PreparedDataset& test_data,
                    const EvalOptions& opts, bool no_gmm, const std::string& run_tag,
                    AccessLog& access) {
    TrainConfig cfg = opts.train;
    if (no_gmm) {
        cfg.lambda1 = 0.0;
        cfg.lambda2 = 0.0;
    }
    cfg.validate();
    const std::uint64_t seed = cfg.model.seed;

    const Split train_split = split(train_data.windows, seed);
    std::vector<Window> test_windows;
    if (&test_data == &train_data) {
        test_windows = train_split.test;
    } else {
        test_windows = split(test_data.windows, seed).test;
    }

    access.note(train_data.name, "train", train_split.train.size());
    const EmbeddingTable train_table = hashed_table(train_data.store, cfg.model.d);
    TrainResult trained = train(train_split.train, train_table, cfg);

    access.note(test_data.name, "score", test_windows.size());
    const EmbeddingTable test_table = &test_data == &train_data
                                          ? train_table
                                          : hashed_table(test_data.store, cfg.model.d);
    std::vector<ScoredWindow> scored =
        score(test_windows, trained.model, test_table, opts.dump_h);

    ThresholdPolicy policy = opts.policy;
    if (policy.mode == ThresholdMode::Contamination && opts.rho_from_labels) {
        std::size_t n_anom = 0;
        for (const auto& s : scored) n_anom += s.label ? 1 : 0;
        if (n_anom == 0 || n_anom == scored.size())
            throw DataError("contamination-from-labels needs a mixed test set");
        policy.rho = static_cast<double>(n_anom) / static_cast<double>(scored.size());
    }

    std::vector<double> quantiles = trained.model.train_energy_quantiles;
    const ScoreKind kind = no_gmm ? ScoreKind::ReconError : ScoreKind::Energy;
    if (no_gmm && policy.mode == ThresholdMode::TrainQuantile) {
        // Quantile grid over training reconstruction errors instead.
        std::vector<const Window*> ptrs;
        ptrs.reserve(train_split.train.size());
        for (const auto& w : train_split.train) ptrs.push_back(&w);
        const auto codes = encode_all(ptrs, train_table, trained.model.enc, cfg.model);
        std::vector<double> errs;
        errs.reserve(codes.size());
        for (const auto& c : codes) errs.push_back(c.recon_error);
        quantiles.resize(1001);
        for (int i = 0; i <= 1000; ++i) quantiles[static_cast<std::size_t>(i)] =
            quantile(errs, i / 1000.0);
    }

    RunOutcome out;
    out.threshold = apply_threshold(scored, policy, quantiles, kind);
    out.overall = metrics_of(scored);

    std::set<std::string> origins;
    for (const auto& s : scored) origins.insert(s.origin);
    if (origins.size() > 1) {
        for (const auto& origin : origins) {
            std::vector<ScoredWindow> sub;
            for (const auto& s : scored) {
                if (s.origin == origin) sub.push_back(s);
            }
            out.per_origin[origin] = metrics_of(sub);
        }
    }

    if (!opts.scores_csv_prefix.empty()) {
        save_scores_csv(scored, opts.scores_csv_prefix + run_tag + ".csv");
    }
    return out;
}

const PreparedDataset& named(const std::map<std::string, PreparedDataset>& data,
                             const std::string& name) {
    auto it = data.find(name);
    if (it == data.end()) throw DataError("unknown dataset '" + name + "'");
    return it->second;
}

ReportRow base_row(const std::string& experiment, const std::string& train_set,
                   const std::string& test_set, const EvalOptions& opts) {
    ReportRow row;
    row.experiment = experiment;
    row.train_set = train_set;
    row.test_set = test_set;
    row.alpha = opts.train.model.alpha;
    row.ablation = "none";
    row.seed = opts.train.model.seed;
    return row;
}

} // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::map<std::string, PreparedDataset>& data,
                                const EvalOptions& opts) {
    ExperimentResult result;
    if (spec.train_sets.empty()) throw DataError("experiment: no training sets named");

    switch (spec.kind) {
    case ExperimentKind::Single: {
        const auto& ds = named(data, spec.train_sets[0]);
        auto out = run_once(ds, ds, opts, false, "_single_" + ds.name, result.access);
        ReportRow row = base_row("single", ds.name, ds.name, opts);
        row.m = out.overall;
        row.threshold = out.threshold;
        result.rows.push_back(row);
        break;
    }
    case ExperimentKind::Fused: {
        std::vector<PreparedDataset> parts;
        for (const auto& name : spec.train_sets) parts.push_back(named(data, name));
        for (const auto& part : parts) {
            result.access.note(part.name, "fuse", part.windows.size());
        }
        const PreparedDataset fused = fuse(parts, opts.train.model.seed);
        auto out = run_once(fused, fused, opts, false, "_fused_" + fused.name, result.access);
        ReportRow row = base_row("fused", fused.name, fused.name, opts);
        row.m = out.overall;
        row.threshold = out.threshold;
        result.rows.push_back(row);
        for (const auto& [origin, m] : out.per_origin) {
            ReportRow orow = base_row("fused", fused.name, fused.name + "[" + origin + "]", opts);
            orow.m = m;
            orow.threshold = out.threshold;
            result.rows.push_back(orow);
        }
        break;
    }
    case ExperimentKind::Transfer: {
        if (spec.test_sets.empty()) throw DataError("transfer: no test set named");
        for (const auto& t : spec.train_sets) {
            if (std::find(spec.test_sets.begin(), spec.test_sets.end(), t) !=
                spec.test_sets.end())
                throw DataError("transfer: train and test sets overlap on '" + t + "'");
        }
        const auto& src = named(data, spec.train_sets[0]);
        const auto& dst = named(data, spec.test_sets[0]);
        auto out = run_once(src, dst, opts, false, "_transfer_" + src.name + "_" + dst.name,
                            result.access);
        ReportRow row = base_row("transfer", src.name, dst.name, opts);
        row.m = out.overall;
        row.threshold = out.threshold;
        result.rows.push_back(row);
        break;
    }
    case ExperimentKind::Ablation: {
        const auto& ds = named(data, spec.train_sets[0]);
        if (!spec.no_entmax && !spec.no_gmm)
            throw DataError("ablation: no variant flagged");
        if (spec.no_entmax) {
            EvalOptions vopts = opts;
            vopts.train.model.alpha = 1.0;
            vopts.train.model.alpha_membership = 1.0;
            auto out = run_once(ds, ds, vopts, false, "_no_entmax_" + ds.name, result.access);
            ReportRow row = base_row("ablation", ds.name, ds.name, vopts);
            row.ablation = "no_entmax";
            row.m = out.overall;
            row.threshold = out.threshold;
            result.rows.push_back(row);
        }
        if (spec.no_gmm) {
            auto out = run_once(ds, ds, opts, true, "_no_gmm_" + ds.name, result.access);
            ReportRow row = base_row("ablation", ds.name, ds.name, opts);
            row.ablation = "no_gmm";
            row.m = out.overall;
            row.threshold = out.threshold;
            result.rows.push_back(row);
        }
        break;
    }
    case ExperimentKind::AlphaSweep: {
        if (spec.alpha_grid.empty()) throw DataError("alpha_sweep: empty grid");
        const auto& ds = named(data, spec.train_sets[0]);
        for (double alpha : spec.alpha_grid) {
            EvalOptions vopts = opts;
            vopts.train.model.alpha = alpha;
            vopts.train.model.alpha_membership = 0.0; // follow alpha
            char tag[64];
            std::snprintf(tag, sizeof(tag), "_alpha_%.4g_", alpha);
            auto out = run_once(ds, ds, vopts, false, tag + ds.name, result.access);
            ReportRow row = base_row("alpha_sweep", ds.name, ds.name, vopts);
            row.m = out.overall;
            row.threshold = out.threshold;
            result.rows.push_back(row);
        }
        break;
    }
    }
    return result;
}

void save_report_csv(const std::vector<ReportRow>& rows, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open " + path + " for writing");
    os << "experiment,train_set,test_set,alpha,ablation,precision,recall,f1,threshold,seed\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%s,%.6f,%.6f,%.6f,%.17g,%llu",
                      r.alpha, r.ablation.c_str(), r.m.precision, r.m.recall, r.m.f1,
                      r.threshold, static_cast<unsigned long long>(r.seed));
        os << r.experiment << ',' << r.train_set << ',' << r.test_set << ',' << buf << '\n';
    }
}

} // namespace mlad
