#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mlad/error.hpp"
#include "mlad/eval.hpp"
#include "mlad/rng.hpp"
#include "mlad/synthetic.hpp"

using namespace mlad;

namespace {

PreparedDataset synth_dataset(const std::string& name, const std::string& system,
                              std::uint64_t seed, int n_windows, double rate = 0.1) {
    SynthConfig scfg;
    scfg.seed = seed;
    scfg.n_windows = n_windows;
    scfg.anomaly_rate = rate;
    scfg.anomaly_lines = 3;
    scfg.system = system;
    const SynthCorpus corpus = generate_corpus(scfg);
    const ParseResult parsed = parse_corpus(corpus.lines, DrainConfig{});
    const auto records = make_records(parsed.keys_per_line, corpus.labels);
    SplitSpec spec;
    spec.window_size = scfg.window_len;
    PreparedDataset ds;
    ds.name = name;
    ds.windows = windowize(records, spec, name);
    ds.store = parsed.store;
    return ds;
}

EvalOptions fast_options(std::uint64_t seed) {
    EvalOptions opts;
    opts.train.model.d = 24;
    opts.train.model.d_h = 8;
    opts.train.model.d_ff = 48;
    opts.train.model.K = 2;
    opts.train.model.dropout = 0.0;
    opts.train.model.seed = seed;
    opts.train.batch = 64;
    opts.train.epochs = 3;
    return opts;
}

} // namespace

TEST_CASE("metrics formulas") {
    // tp=3, fp=1, fn=1, tn=2
    const Metrics m = metrics({1, 1, 1, 1, 0, 0, 0}, {1, 1, 1, 0, 1, 0, 0});
    CHECK(m.tp == 3);
    CHECK(m.fp == 1);
    CHECK(m.fn == 1);
    CHECK(m.tn == 2);
    CHECK(m.precision == doctest::Approx(0.75));
    CHECK(m.recall == doctest::Approx(0.75));
    CHECK(m.f1 == doctest::Approx(0.75));

    const Metrics perfect = metrics({1, 0, 1}, {1, 0, 1});
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f1 == 1.0);

    CHECK_THROWS_AS(metrics({1}, {1, 0}), DataError);
}

TEST_CASE("degenerate confusion cells report zero with a flag") {
    const Metrics no_pred = metrics({0, 0}, {1, 0});
    CHECK(no_pred.degenerate_precision);
    CHECK(no_pred.precision == 0.0);
    CHECK_FALSE(no_pred.degenerate_recall);

    const Metrics no_pos = metrics({0, 1}, {0, 0});
    CHECK(no_pos.degenerate_recall);
    CHECK(no_pos.recall == 0.0);
    CHECK(no_pos.f1 == 0.0);
}

TEST_CASE("harmonic mean of a published precision/recall pair") {
    // With P = 0.9492 and R = 0.8932 the formula yields about 0.9203, and
    // that is the value the metrics op must produce from matching counts.
    const double p = 0.9492, r = 0.8932;
    const double f1 = 2 * p * r / (p + r);
    CHECK(f1 == doctest::Approx(0.92033).epsilon(1e-4));
    // counts realizing approximately those ratios: tp=9492 of 10000 predicted
    // positives; fn chosen so tp/(tp+fn) ~= 0.8932
    const long tp = 9492, fp = 508, fn = 1135;
    const double prec = double(tp) / (tp + fp);
    const double rec = double(tp) / (tp + fn);
    CHECK(prec == doctest::Approx(p).epsilon(1e-4));
    CHECK(rec == doctest::Approx(r).epsilon(1e-3));
}

TEST_CASE("metrics match brute-force confusion counting on random lists") {
    Rng rng(888);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.below(1000);
        std::vector<int> verdicts(n), labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            verdicts[i] = rng.below(2) ? 1 : 0;
            labels[i] = rng.below(2) ? 1 : 0;
        }
        long tp = 0, fp = 0, fn = 0, tn = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (verdicts[i] && labels[i]) ++tp;
            if (verdicts[i] && !labels[i]) ++fp;
            if (!verdicts[i] && labels[i]) ++fn;
            if (!verdicts[i] && !labels[i]) ++tn;
        }
        const Metrics m = metrics(verdicts, labels);
        CHECK(m.tp == tp);
        CHECK(m.fp == fp);
        CHECK(m.fn == fn);
        CHECK(m.tn == tn);
    }
}

TEST_CASE("single experiment produces a filled report row") {
    std::map<std::string, PreparedDataset> data;
    data.emplace("A", synth_dataset("A", "A", 3, 200));
    ExperimentSpec spec;
    spec.kind = ExperimentKind::Single;
    spec.train_sets = {"A"};
    const auto result = run_experiment(spec, data, fast_options(3));
    REQUIRE(result.rows.size() == 1);
    CHECK(result.rows[0].experiment == "single");
    CHECK(result.rows[0].train_set == "A");
    CHECK(result.rows[0].m.tp + result.rows[0].m.fn > 0);
    CHECK(result.access.count("A", "train") > 0);
}

TEST_CASE("ablation rows are tagged and no_entmax records alpha 1") {
    std::map<std::string, PreparedDataset> data;
    data.emplace("A", synth_dataset("A", "A", 4, 200));
    ExperimentSpec spec;
    spec.kind = ExperimentKind::Ablation;
    spec.train_sets = {"A"};
    spec.no_entmax = true;
    spec.no_gmm = true;
    const auto result = run_experiment(spec, data, fast_options(4));
    REQUIRE(result.rows.size() == 2);
    CHECK(result.rows[0].ablation == "no_entmax");
    CHECK(result.rows[0].alpha == 1.0);
    CHECK(result.rows[1].ablation == "no_gmm");

    ExperimentSpec none;
    none.kind = ExperimentKind::Ablation;
    none.train_sets = {"A"};
    CHECK_THROWS_AS(run_experiment(none, data, fast_options(4)), DataError);
}

TEST_CASE("alpha sweep emits one row per grid point") {
    std::map<std::string, PreparedDataset> data;
    data.emplace("A", synth_dataset("A", "A", 5, 200));
    ExperimentSpec spec;
    spec.kind = ExperimentKind::AlphaSweep;
    spec.train_sets = {"A"};
    spec.alpha_grid = {1.0, 1.2, 1.5};
    const auto result = run_experiment(spec, data, fast_options(5));
    REQUIRE(result.rows.size() == 3);
    CHECK(result.rows[0].alpha == 1.0);
    CHECK(result.rows[1].alpha == 1.2);
    CHECK(result.rows[2].alpha == 1.5);
}

TEST_CASE("fused experiment reports overall and per-origin rows") {
    std::map<std::string, PreparedDataset> data;
    data.emplace("A", synth_dataset("A", "A", 6, 160));
    data.emplace("B", synth_dataset("B", "B", 7, 120));
    ExperimentSpec spec;
    spec.kind = ExperimentKind::Fused;
    spec.train_sets = {"A", "B"};
    const auto result = run_experiment(spec, data, fast_options(6));
    REQUIRE(result.rows.size() == 3);
    CHECK(result.rows[0].test_set == "A+B");
    CHECK(result.rows[1].test_set == "A+B[A]");
    CHECK(result.rows[2].test_set == "A+B[B]");
}

TEST_CASE("transfer never reads the target during training") {
    std::map<std::string, PreparedDataset> data;
    data.emplace("A", synth_dataset("A", "A", 8, 200));
    data.emplace("B", synth_dataset("B", "B", 9, 160));
    ExperimentSpec spec;
    spec.kind = ExperimentKind::Transfer;
    spec.train_sets = {"A"};
    spec.test_sets = {"B"};
    const auto result = run_experiment(spec, data, fast_options(8));
    REQUIRE(result.rows.size() == 1);
    CHECK(result.rows[0].train_set == "A");
    CHECK(result.rows[0].test_set == "B");
    CHECK(result.access.count("B", "train") == 0);
    CHECK(result.access.count("A", "train") > 0);
    CHECK(result.access.count("B", "score") > 0);

    ExperimentSpec overlapping;
    overlapping.kind = ExperimentKind::Transfer;
    overlapping.train_sets = {"A"};
    overlapping.test_sets = {"A"};
    CHECK_THROWS_AS(run_experiment(overlapping, data, fast_options(8)), DataError);
}

TEST_CASE("report csv layout") {
    ReportRow row;
    row.experiment = "single";
    row.train_set = "A";
    row.test_set = "A";
    row.alpha = 1.5;
    row.ablation = "none";
    row.m.precision = 0.5;
    row.m.recall = 0.25;
    row.m.f1 = 1.0 / 3.0;
    row.threshold = -2.5;
    row.seed = 9;
    const std::string path = "/tmp/mlad_test_report.csv";
    save_report_csv({row}, path);
    std::ifstream is(path);
    std::string header, line;
    std::getline(is, header);
    std::getline(is, line);
    CHECK(header ==
          "experiment,train_set,test_set,alpha,ablation,precision,recall,f1,threshold,seed");
    CHECK(line == "single,A,A,1.5,none,0.500000,0.250000,0.333333,-2.5,9");
}
