// Command-line front end: parse / prepare / train / score / eval, one
// pipeline stage per subcommand, each emitting inspectable text artifacts
// plus a JSON run manifest.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "mlad/checkpoint.hpp"
#include "mlad/dataset.hpp"
#include "mlad/detect.hpp"
#include "mlad/embed.hpp"
#include "mlad/error.hpp"
#include "mlad/eval.hpp"
#include "mlad/logparse.hpp"
#include "mlad/manifest.hpp"
#include "mlad/synthetic.hpp"
#include "mlad/trainer.hpp"

namespace fs = std::filesystem;
using namespace mlad;

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::vector<std::pair<std::string, std::string>> config_pairs(const TrainConfig& cfg) {
    auto d = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    return {
        {"d", std::to_string(cfg.model.d)},
        {"d_h", std::to_string(cfg.model.d_h)},
        {"d_ff", std::to_string(cfg.model.d_ff)},
        {"heads", std::to_string(cfg.model.heads)},
        {"layers", std::to_string(cfg.model.layers)},
        {"K", std::to_string(cfg.model.K)},
        {"alpha", d(cfg.model.alpha)},
        {"alpha_membership", d(cfg.model.alpha_membership)},
        {"dropout", d(cfg.model.dropout)},
        {"epsilon", d(cfg.model.epsilon)},
        {"recon_target",
         cfg.model.recon_target == ReconTarget::Pooled ? "pooled" : "per_position"},
        {"positional", cfg.model.positional ? "1" : "0"},
        {"seed", std::to_string(cfg.model.seed)},
        {"lambda1", d(cfg.lambda1)},
        {"lambda2", d(cfg.lambda2)},
        {"lr", d(cfg.lr)},
        {"batch", std::to_string(cfg.batch)},
        {"epochs", std::to_string(cfg.epochs)},
        {"clip_norm", d(cfg.clip_norm)},
    };
}

// Training hyperparameters shared by train and eval. Values given on the
// command line override the config file.
struct TrainFlags {
    std::string config_file;
    TrainConfig cfg;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_file, "key=value config file");
        cmd->add_option("--d", cfg.model.d, "embedding dimension");
        cmd->add_option("--d-h", cfg.model.d_h, "window code dimension");
        cmd->add_option("--d-ff", cfg.model.d_ff, "feed-forward width (0: 4*d)");
        cmd->add_option("--heads", cfg.model.heads, "attention heads");
        cmd->add_option("--layers", cfg.model.layers, "encoder layers");
        cmd->add_option("--k", cfg.model.K, "mixture components");
        cmd->add_option("--alpha", cfg.model.alpha, "entmax exponent");
        cmd->add_option("--alpha-membership", cfg.model.alpha_membership,
                        "membership entmax exponent (0: reuse alpha)");
        cmd->add_option("--dropout", cfg.model.dropout, "dropout rate");
        cmd->add_option("--epsilon", cfg.model.epsilon, "covariance regularizer");
        cmd->add_option("--seed", cfg.model.seed, "run seed");
        cmd->add_option("--lambda1", cfg.lambda1, "energy term weight");
        cmd->add_option("--lambda2", cfg.lambda2, "covariance penalty weight");
        cmd->add_option("--lr", cfg.lr, "learning rate");
        cmd->add_option("--batch", cfg.batch, "batch size");
        cmd->add_option("--epochs", cfg.epochs, "training epochs");
        cmd->add_flag("--positional", cfg.model.positional, "add sinusoidal positions");
        cmd->add_option("--recon-target",
                        [this](const std::vector<std::string>& v) {
                            apply_config_line(cfg, "recon_target", v[0]);
                            return true;
                        },
                        "pooled or per_position");
    }

    // File first, then re-apply command line on top.
    TrainConfig resolve(const CLI::App* cmd) const {
        if (config_file.empty()) return cfg;
        TrainConfig merged = load_train_config(config_file);
        auto override_if = [&](const char* flag, auto member_ptr) {
            if (cmd->count(flag) > 0) merged.*member_ptr = cfg.*member_ptr;
        };
        auto override_model = [&](const char* flag, auto member_ptr) {
            if (cmd->count(flag) > 0) merged.model.*member_ptr = cfg.model.*member_ptr;
        };
        override_model("--d", &ModelConfig::d);
        override_model("--d-h", &ModelConfig::d_h);
        override_model("--d-ff", &ModelConfig::d_ff);
        override_model("--heads", &ModelConfig::heads);
        override_model("--layers", &ModelConfig::layers);
        override_model("--k", &ModelConfig::K);
        override_model("--alpha", &ModelConfig::alpha);
        override_model("--alpha-membership", &ModelConfig::alpha_membership);
        override_model("--dropout", &ModelConfig::dropout);
        override_model("--epsilon", &ModelConfig::epsilon);
        override_model("--seed", &ModelConfig::seed);
        override_model("--positional", &ModelConfig::positional);
        override_model("--recon-target", &ModelConfig::recon_target);
        override_if("--lambda1", &TrainConfig::lambda1);
        override_if("--lambda2", &TrainConfig::lambda2);
        override_if("--lr", &TrainConfig::lr);
        override_if("--batch", &TrainConfig::batch);
        override_if("--epochs", &TrainConfig::epochs);
        return merged;
    }
};

EmbeddingTable make_table(const std::string& embeddings_path, const TemplateStore& store,
                          int d) {
    if (embeddings_path.empty()) return hashed_table(store, d);
    EmbeddingTable t = import_vectors(embeddings_path, store);
    if (t.dim != d)
        throw DataError("imported embedding dim " + std::to_string(t.dim) +
                        " conflicts with configured d=" + std::to_string(d));
    return t;
}

int run(int argc, char** argv) {
    CLI::App app{"multi-system log anomaly detection pipeline"};
    app.require_subcommand(1);

    // ---- parse ----------------------------------------------------------
    auto* parse_cmd = app.add_subcommand("parse", "mine templates from a raw log");
    std::string parse_input, parse_out, parse_strip;
    std::vector<std::string> extra_masks;
    bool no_default_masks = false;
    DrainConfig drain;
    parse_cmd->add_option("--input", parse_input, "raw log, one message per line")->required();
    parse_cmd->add_option("--out", parse_out, "output prefix")->required();
    parse_cmd->add_option("--depth", drain.depth, "parse tree depth");
    parse_cmd->add_option("--threshold", drain.similarity_threshold, "merge similarity");
    parse_cmd->add_option("--max-children", drain.max_children, "children per tree node");
    parse_cmd->add_option("--extra-mask", extra_masks, "additional mask regex");
    parse_cmd->add_option("--strip-prefix", parse_strip, "regex stripped from line starts");
    parse_cmd->add_flag("--no-default-masks", no_default_masks, "disable built-in masks");

    // ---- prepare --------------------------------------------------------
    auto* prep_cmd = app.add_subcommand("prepare", "build labeled windows");
    std::string prep_keys, prep_templates, prep_labels, prep_labels_csv, prep_corpus;
    std::string prep_out, prep_origin = "logs", prep_session_regex;
    int prep_window = 20;
    bool prep_split = false;
    std::uint64_t prep_seed = 1;
    std::vector<std::string> fuse_prefixes;
    bool synth = false;
    SynthConfig synth_cfg;
    prep_cmd->add_option("--keys", prep_keys, "per-line keys file from parse");
    prep_cmd->add_option("--templates", prep_templates, "template store from parse");
    prep_cmd->add_option("--labels", prep_labels, "per-line 0/1 labels");
    prep_cmd->add_option("--labels-csv", prep_labels_csv, "session_id,label CSV");
    prep_cmd->add_option("--corpus", prep_corpus, "raw log (session id extraction)");
    prep_cmd->add_option("--out", prep_out, "output prefix or directory")->required();
    prep_cmd->add_option("--origin", prep_origin, "dataset origin tag");
    prep_cmd->add_option("--window", prep_window, "sliding window size");
    prep_cmd->add_option("--session-id-regex", prep_session_regex, "session mode id pattern");
    prep_cmd->add_flag("--split", prep_split, "emit train/test split files");
    prep_cmd->add_option("--seed", prep_seed, "split/shuffle seed");
    prep_cmd->add_option("--fuse", fuse_prefixes, "fuse prepared dataset prefixes")
        ->expected(2, -1);
    prep_cmd->add_flag("--synthetic", synth, "generate a synthetic labeled corpus");
    prep_cmd->add_option("--windows", synth_cfg.n_windows, "synthetic window count");
    prep_cmd->add_option("--anomaly-rate", synth_cfg.anomaly_rate, "synthetic anomaly rate");
    prep_cmd->add_option("--anomaly-lines", synth_cfg.anomaly_lines,
                         "planted lines per anomalous window");
    prep_cmd->add_option("--system", synth_cfg.system, "synthetic system (A or B)");

    // ---- train ----------------------------------------------------------
    auto* train_cmd = app.add_subcommand("train", "train a model on normal windows");
    std::string train_windows, train_templates, train_embeddings, train_out;
    TrainFlags train_flags;
    train_cmd->add_option("--windows", train_windows, "training windows file")->required();
    train_cmd->add_option("--templates", train_templates, "template store")->required();
    train_cmd->add_option("--embeddings", train_embeddings, "imported vector TSV");
    train_cmd->add_option("--out", train_out, "checkpoint path")->required();
    train_flags.attach(train_cmd);

    // ---- score ----------------------------------------------------------
    auto* score_cmd = app.add_subcommand("score", "score windows with a trained model");
    std::string score_model, score_windows, score_templates, score_embeddings, score_out;
    std::string score_policy = "train_quantile", score_rho = "";
    double score_q = 0.99;
    bool score_dump_h = false;
    score_cmd->add_option("--model", score_model, "checkpoint")->required();
    score_cmd->add_option("--windows", score_windows, "windows to score")->required();
    score_cmd->add_option("--templates", score_templates, "template store")->required();
    score_cmd->add_option("--embeddings", score_embeddings, "imported vector TSV");
    score_cmd->add_option("--out", score_out, "scores CSV")->required();
    score_cmd->add_option("--policy", score_policy, "train_quantile or contamination");
    score_cmd->add_option("--q", score_q, "training-energy quantile");
    score_cmd->add_option("--rho", score_rho, "contamination rate, or 'auto' from labels");
    score_cmd->add_flag("--dump-h", score_dump_h, "append window codes to the CSV");

    // ---- eval -----------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("eval", "run an experiment protocol");
    std::string eval_kind = "single", eval_out, eval_scores_prefix;
    std::vector<std::string> eval_datasets, eval_train, eval_test, eval_ablate;
    std::string eval_sweep;
    TrainFlags eval_flags;
    eval_cmd->add_option("--kind", eval_kind,
                         "single | fused | transfer | ablation | alpha_sweep");
    eval_cmd->add_option("--dataset", eval_datasets, "NAME=PREFIX (expects PREFIX.windows "
                                                     "and PREFIX.templates)")
        ->required();
    eval_cmd->add_option("--train", eval_train, "training set name(s)")->required();
    eval_cmd->add_option("--test", eval_test, "test set name (transfer)");
    eval_cmd->add_option("--ablate", eval_ablate, "no_entmax and/or no_gmm");
    eval_cmd->add_option("--alpha-sweep", eval_sweep, "comma-separated alpha grid");
    eval_cmd->add_option("--out", eval_out, "report CSV")->required();
    eval_cmd->add_option("--scores-prefix", eval_scores_prefix, "per-run score CSV prefix");
    eval_flags.attach(eval_cmd);

    CLI11_PARSE(app, argc, argv);

    if (parse_cmd->parsed()) {
        if (no_default_masks) drain.masks.clear();
        for (std::size_t i = 0; i < extra_masks.size(); ++i) {
            drain.masks.push_back({"extra" + std::to_string(i), extra_masks[i]});
        }
        drain.strip_prefix = parse_strip;
        const ParseResult result = parse_corpus_file(parse_input, drain);
        const std::string templates_path = parse_out + ".templates";
        const std::string keys_path = parse_out + ".keys";
        result.store.save_file(templates_path);
        {
            std::ofstream os(keys_path, std::ios::binary);
            if (!os) throw DataError("cannot open " + keys_path + " for writing");
            for (long k : result.keys_per_line) {
                if (k < 0) os << "-\n";
                else os << k << '\n';
            }
        }
        std::cout << "parsed " << result.keys_per_line.size() << " lines, "
                  << result.store.size() << " templates, " << result.skipped << " skipped\n";
        RunManifest man;
        man.command = "parse";
        man.config = {{"depth", std::to_string(drain.depth)},
                      {"threshold", std::to_string(drain.similarity_threshold)},
                      {"max_children", std::to_string(drain.max_children)}};
        man.inputs = {parse_input};
        man.artifacts = {templates_path, keys_path};
        man.save(parse_out + ".parse.manifest.json");
        return 0;
    }

    if (prep_cmd->parsed()) {
        if (synth) {
            const SynthCorpus corpus = generate_corpus(synth_cfg);
            fs::create_directories(prep_out);
            const std::string corpus_path = prep_out + "/corpus.log";
            const std::string labels_path = prep_out + "/labels.txt";
            {
                std::ofstream os(corpus_path, std::ios::binary);
                for (const auto& l : corpus.lines) os << l << '\n';
            }
            {
                std::ofstream os(labels_path, std::ios::binary);
                for (int l : corpus.labels) os << l << '\n';
            }
            std::cout << "generated " << corpus.lines.size() << " lines ("
                      << corpus.n_anomalous_windows << " anomalous windows)\n";
            RunManifest man;
            man.command = "prepare --synthetic";
            man.seed = synth_cfg.seed;
            man.config = {{"windows", std::to_string(synth_cfg.n_windows)},
                          {"window_len", std::to_string(synth_cfg.window_len)},
                          {"anomaly_rate", std::to_string(synth_cfg.anomaly_rate)},
                          {"system", synth_cfg.system}};
            man.artifacts = {corpus_path, labels_path};
            man.save(prep_out + "/prepare.manifest.json");
            return 0;
        }

        if (!fuse_prefixes.empty()) {
            std::vector<PreparedDataset> parts;
            for (const auto& prefix : fuse_prefixes) {
                PreparedDataset ds;
                ds.name = fs::path(prefix).filename().string();
                ds.windows = load_windows_file(prefix + ".windows");
                ds.store = TemplateStore::load_file(prefix + ".templates");
                parts.push_back(std::move(ds));
            }
            const PreparedDataset fused = fuse(parts, prep_seed);
            save_windows_file(fused.windows, prep_out + ".windows");
            fused.store.save_file(prep_out + ".templates");
            std::cout << "fused " << parts.size() << " datasets into " << fused.windows.size()
                      << " windows\n";
            RunManifest man;
            man.command = "prepare --fuse";
            man.seed = prep_seed;
            for (const auto& prefix : fuse_prefixes) {
                man.inputs.push_back(prefix + ".windows");
                man.inputs.push_back(prefix + ".templates");
            }
            man.artifacts = {prep_out + ".windows", prep_out + ".templates"};
            man.save(prep_out + ".prepare.manifest.json");
            return 0;
        }

        if (prep_keys.empty() || prep_templates.empty())
            throw DataError("prepare needs --keys and --templates (or --synthetic/--fuse)");
        std::vector<long> keys;
        for (const auto& line : read_lines(prep_keys)) {
            if (line.empty()) continue;
            keys.push_back(line == "-" ? -1 : std::stol(line));
        }

        std::vector<LogRecord> records;
        SplitSpec spec;
        spec.seed = prep_seed;
        spec.window_size = prep_window;
        if (!prep_session_regex.empty()) {
            spec.mode = WindowMode::Session;
            if (prep_corpus.empty())
                throw DataError("session mode needs --corpus for id extraction");
            std::vector<int> labels(keys.size(), 0);
            if (!prep_labels.empty()) labels = load_labels_file(prep_labels);
            records = make_records(keys, labels);
            const auto raw = read_lines(prep_corpus);
            const auto sess = sessionize(records, raw, prep_session_regex);
            records = sess.records;
            if (sess.dropped > 0) {
                std::cout << "warning: " << sess.dropped << " lines without a session id\n";
            }
            if (!prep_labels_csv.empty()) {
                apply_session_labels(records, load_session_labels_csv(prep_labels_csv));
            }
        } else {
            if (prep_labels.empty()) throw DataError("prepare needs --labels");
            records = make_records(keys, load_labels_file(prep_labels));
        }

        const auto windows = windowize(records, spec, prep_origin);
        save_windows_file(windows, prep_out + ".windows");
        fs::copy_file(prep_templates, prep_out + ".templates",
                      fs::copy_options::overwrite_existing);
        std::cout << "prepared " << windows.size() << " windows\n";
        RunManifest man;
        man.command = "prepare";
        man.seed = prep_seed;
        man.config = {{"window", std::to_string(prep_window)},
                      {"mode", prep_session_regex.empty() ? "sliding" : "session"},
                      {"origin", prep_origin}};
        man.inputs = {prep_keys, prep_templates};
        if (!prep_labels.empty()) man.inputs.push_back(prep_labels);
        man.artifacts = {prep_out + ".windows", prep_out + ".templates"};

        if (prep_split) {
            const Split s = split(windows, prep_seed);
            save_windows_file(s.train, prep_out + ".train.windows");
            save_windows_file(s.test, prep_out + ".test.windows");
            std::cout << "split: " << s.train.size() << " train / " << s.test.size()
                      << " test windows\n";
            man.artifacts.push_back(prep_out + ".train.windows");
            man.artifacts.push_back(prep_out + ".test.windows");
        }
        man.save(prep_out + ".prepare.manifest.json");
        return 0;
    }

    if (train_cmd->parsed()) {
        TrainConfig cfg = train_flags.resolve(train_cmd);
        const auto windows = load_windows_file(train_windows);
        const auto store = TemplateStore::load_file(train_templates);
        const auto table = make_table(train_embeddings, store, cfg.model.d);
        TrainResult result = train(windows, table, cfg);
        save_model(result.model, train_out);
        result.report.checkpoint_path = train_out;
        result.report.save_file(train_out + ".report.txt");
        std::cout << "trained " << cfg.epochs << " epochs, final loss "
                  << result.report.epochs.back().mean_total << "\n";
        RunManifest man;
        man.command = "train";
        man.seed = cfg.model.seed;
        man.config = config_pairs(cfg);
        man.inputs = {train_windows, train_templates};
        if (!train_embeddings.empty()) man.inputs.push_back(train_embeddings);
        man.artifacts = {train_out};
        man.save(train_out + ".manifest.json");
        return 0;
    }

    if (score_cmd->parsed()) {
        const TrainedModel model = load_model(score_model);
        const auto windows = load_windows_file(score_windows);
        const auto store = TemplateStore::load_file(score_templates);
        const auto table = make_table(score_embeddings, store, model.cfg.d);
        auto scored = score(windows, model, table, score_dump_h);
        ThresholdPolicy policy;
        if (score_policy == "train_quantile") {
            policy.mode = ThresholdMode::TrainQuantile;
            policy.q = score_q;
        } else if (score_policy == "contamination") {
            policy.mode = ThresholdMode::Contamination;
            if (score_rho == "auto") {
                std::size_t n_anom = 0;
                for (const auto& s : scored) n_anom += s.label ? 1 : 0;
                policy.rho = static_cast<double>(n_anom) / static_cast<double>(scored.size());
            } else if (!score_rho.empty()) {
                policy.rho = std::stod(score_rho);
            } else {
                throw DataError("contamination policy needs --rho RATE or --rho auto");
            }
        } else {
            throw DataError("unknown threshold policy '" + score_policy + "'");
        }
        const double threshold =
            apply_threshold(scored, policy, model.train_energy_quantiles);
        save_scores_csv(scored, score_out);
        std::size_t flagged = 0;
        for (const auto& s : scored) flagged += s.verdict;
        std::cout << "scored " << scored.size() << " windows, flagged " << flagged
                  << " at threshold " << threshold << "\n";
        RunManifest man;
        man.command = "score";
        man.seed = model.cfg.seed;
        man.config = {{"policy", score_policy}};
        man.inputs = {score_model, score_windows, score_templates};
        man.artifacts = {score_out};
        man.save(score_out + ".manifest.json");
        return 0;
    }

    if (eval_cmd->parsed()) {
        EvalOptions opts;
        opts.train = eval_flags.resolve(eval_cmd);
        opts.scores_csv_prefix = eval_scores_prefix;

        std::map<std::string, PreparedDataset> data;
        for (const auto& def : eval_datasets) {
            const auto eq = def.find('=');
            if (eq == std::string::npos)
                throw DataError("--dataset expects NAME=PREFIX, got '" + def + "'");
            PreparedDataset ds;
            ds.name = def.substr(0, eq);
            const std::string prefix = def.substr(eq + 1);
            ds.windows = load_windows_file(prefix + ".windows");
            ds.store = TemplateStore::load_file(prefix + ".templates");
            data.emplace(ds.name, std::move(ds));
        }

        ExperimentSpec spec;
        spec.train_sets = eval_train;
        spec.test_sets = eval_test;
        if (eval_kind == "single") spec.kind = ExperimentKind::Single;
        else if (eval_kind == "fused") spec.kind = ExperimentKind::Fused;
        else if (eval_kind == "transfer") spec.kind = ExperimentKind::Transfer;
        else if (eval_kind == "ablation") spec.kind = ExperimentKind::Ablation;
        else if (eval_kind == "alpha_sweep") spec.kind = ExperimentKind::AlphaSweep;
        else throw DataError("unknown experiment kind '" + eval_kind + "'");
        for (const auto& a : eval_ablate) {
            if (a == "no_entmax") spec.no_entmax = true;
            else if (a == "no_gmm") spec.no_gmm = true;
            else throw DataError("unknown ablation '" + a + "'");
        }
        if (!eval_ablate.empty() && spec.kind == ExperimentKind::Single)
            spec.kind = ExperimentKind::Ablation;
        if (!eval_sweep.empty()) {
            spec.kind = ExperimentKind::AlphaSweep;
            std::istringstream ss(eval_sweep);
            std::string tok;
            while (std::getline(ss, tok, ',')) spec.alpha_grid.push_back(std::stod(tok));
        }

        const ExperimentResult result = run_experiment(spec, data, opts);
        save_report_csv(result.rows, eval_out);
        for (const auto& row : result.rows) {
            std::cout << row.experiment << " " << row.train_set << "->" << row.test_set
                      << " alpha=" << row.alpha << " ablation=" << row.ablation
                      << " P=" << row.m.precision << " R=" << row.m.recall
                      << " F1=" << row.m.f1 << "\n";
        }
        if (spec.kind == ExperimentKind::Transfer) {
            std::cout << "target-dataset reads during training: "
                      << result.access.count(spec.test_sets[0], "train") << "\n";
        }
        RunManifest man;
        man.command = "eval";
        man.seed = opts.train.model.seed;
        man.config = config_pairs(opts.train);
        man.config.push_back({"kind", eval_kind});
        man.artifacts = {eval_out};
        man.save(eval_out + ".manifest.json");
        return 0;
    }

    return 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
