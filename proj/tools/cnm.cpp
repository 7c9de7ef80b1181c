// cnm: train, evaluate and inspect complex-valued matching models, and audit
// density-matrix metrics.
//
// Exit codes: 0 success, 2 bad configuration or missing path, 3 bad data,
// 4 numeric failure, 1 anything else.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cnm/checkpoint.hpp"
#include "cnm/data_io.hpp"
#include "cnm/errors.hpp"
#include "cnm/evaluation.hpp"
#include "cnm/inspect.hpp"
#include "cnm/metrics_lab.hpp"
#include "cnm/synthetic.hpp"
#include "cnm/trainer.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kData = 3, kNumeric = 4 };

struct Common {
    std::string dataset;
    std::string dev;
    std::string format;
    std::string checkpoint;
    std::string out = ".";
    std::string glove;
    std::uint64_t seed = 1;
};

struct TrainFlags {
    double learning_rate = 0.05;
    double l2_lambda = 1e-6;
    std::size_t batch_size = 16;
    double margin = 0.1;
    double dropout = 0.9;
    bool dropout_is_keep = false;
    std::size_t epochs = 20;
    std::string optimizer = "sgd";
    std::size_t embedding_dim = 50;
    std::size_t measurements = 50;
    std::vector<std::size_t> windows{1, 2, 3, 4};
    std::string mixture = "local";
    bool real = false;
    std::size_t max_length = 40;

    cnm::TrainerConfig to_config(std::uint64_t seed) const {
        cnm::TrainerConfig c;
        c.learning_rate = learning_rate;
        c.l2_lambda = l2_lambda;
        c.batch_size = batch_size;
        c.margin = margin;
        c.dropout = {dropout, dropout_is_keep};
        c.epochs = epochs;
        c.seed = seed;
        if (optimizer == "sgd") c.optimizer = cnm::OptimizerKind::sgd;
        else if (optimizer == "adam") c.optimizer = cnm::OptimizerKind::adam;
        else throw cnm::ConfigError("unknown optimizer '" + optimizer + "' (sgd or adam)");
        c.model.embedding_dim = embedding_dim;
        c.model.measurement_count = measurements;
        c.model.window_sizes = windows;
        if (mixture == "local") c.model.mixture = cnm::MixtureKind::local;
        else if (mixture == "global") c.model.mixture = cnm::MixtureKind::global;
        else throw cnm::ConfigError("unknown mixture '" + mixture + "' (local or global)");
        c.model.complex_valued = !real;
        c.model.max_length = max_length;
        c.validate();
        return c;
    }
};

void add_trainer_flags(CLI::App* cmd, TrainFlags& f) {
    cmd->add_option("--lr", f.learning_rate, "learning rate")->capture_default_str();
    cmd->add_option("--l2", f.l2_lambda, "L2 penalty on the amplitude table")->capture_default_str();
    cmd->add_option("--batch-size", f.batch_size)->capture_default_str();
    cmd->add_option("--margin", f.margin, "triplet hinge margin")->capture_default_str();
    cmd->add_option("--dropout", f.dropout, "dropout drop probability")->capture_default_str();
    cmd->add_flag("--dropout-is-keep", f.dropout_is_keep, "read --dropout as a keep probability");
    cmd->add_option("--epochs", f.epochs)->capture_default_str();
    cmd->add_option("--optimizer", f.optimizer, "sgd or adam")->capture_default_str();
    cmd->add_option("--embedding-dim", f.embedding_dim)->capture_default_str();
    cmd->add_option("--measurements", f.measurements, "measurement count k")->capture_default_str();
    cmd->add_option("--windows", f.windows, "window sizes, ascending")->delimiter(',')->capture_default_str();
    cmd->add_option("--mixture", f.mixture, "local or global")->capture_default_str();
    cmd->add_flag("--real", f.real, "real-valued ablation (phases ignored)");
    cmd->add_option("--max-length", f.max_length, "tokens kept per sentence")->capture_default_str();
}

void require_file(const std::string& path, const char* what) {
    if (path.empty()) throw cnm::ConfigError(std::string("missing ") + what + " path");
    if (!fs::exists(path)) throw cnm::ConfigError(std::string(what) + " not found: " + path);
}

fs::path output_dir(const std::string& out) {
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw cnm::ConfigError("cannot create output directory " + out + ": " + ec.message());
    return dir;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw cnm::ConfigError("cannot write " + path.string());
    return out;
}

cnm::FormatDescriptor format_of(const Common& c) {
    if (c.format.empty()) return cnm::FormatDescriptor::canonical();
    require_file(c.format, "format descriptor");
    return cnm::FormatDescriptor::load(c.format);
}

cnm::QADataset load_split(const std::string& path, const cnm::FormatDescriptor& format, const char* what,
                          const char* split) {
    require_file(path, what);
    cnm::LoadStats stats;
    auto ds = cnm::load_tsv(path, format, split, &stats);
    std::cerr << what << ": " << stats.questions << " questions, " << stats.pairs << " pairs (" << stats.rows
              << " rows; dropped " << stats.pairs_dropped_empty << " empty pairs and "
              << stats.questions_without_positive << " questions without a positive)\n";
    return ds;
}

int cmd_train(const Common& c, const TrainFlags& f) {
    const auto config = f.to_config(c.seed);
    const auto format = format_of(c);
    const auto train_raw = load_split(c.dataset, format, "dataset", "train");
    std::optional<cnm::QADataset> dev_raw;
    if (!c.dev.empty()) dev_raw = load_split(c.dev, format, "dev set", "dev");
    if (!c.glove.empty()) require_file(c.glove, "GloVe file");
    const fs::path dir = output_dir(c.out);

    const auto vocab = cnm::build_vocab(std::span(&train_raw, 1));
    const auto train = cnm::encode(train_raw, vocab, config.model.max_length);
    std::optional<cnm::EncodedDataset> dev;
    if (dev_raw) dev = cnm::encode(*dev_raw, vocab, config.model.max_length);

    auto log = open_out(dir / "train_log.jsonl");
    auto result = cnm::train(train, dev ? &*dev : nullptr, cnm::init_parameters(vocab, config.model, c.seed, c.glove),
                             config, [&](const cnm::EpochRecord& r) {
                                 cnm::write_log_record(log, r);
                                 std::cerr << "epoch " << r.epoch << " loss " << r.loss;
                                 if (r.dev_map) std::cerr << " dev MAP " << *r.dev_map << " MRR " << *r.dev_mrr;
                                 std::cerr << '\n';
                             });
    cnm::save_checkpoint(dir / "checkpoint.txt", {config.model, vocab, std::move(result.best)});
    std::cout << "checkpoint " << (dir / "checkpoint.txt").string() << " (epoch " << result.best_epoch << ")\n";
    if (dev) std::cout << "best dev MAP " << result.best_dev_map << '\n';
    return kOk;
}

int cmd_eval(const Common& c) {
    require_file(c.checkpoint, "checkpoint");
    const auto ckpt = cnm::load_checkpoint(c.checkpoint);
    const auto raw = load_split(c.dataset, format_of(c), "dataset", "eval");
    const fs::path dir = output_dir(c.out);
    const auto report = cnm::evaluate(ckpt.params, ckpt.model, cnm::encode(raw, ckpt.vocab, ckpt.model.max_length));
    auto table = open_out(dir / "report.tsv");
    cnm::write_report_table(table, report);
    auto jsonl = open_out(dir / "report.jsonl");
    cnm::write_report_jsonl(jsonl, report);
    std::cout << "MAP " << report.map << "\nMRR " << report.mrr << '\n';
    return kOk;
}

int cmd_grid(const Common& c, const TrainFlags& f, const cnm::GridPools& pools, std::size_t max_runs) {
    const auto base = f.to_config(c.seed);
    if (c.dev.empty()) throw cnm::ConfigError("grid search needs --dev");
    const auto format = format_of(c);
    const auto train_raw = load_split(c.dataset, format, "dataset", "train");
    const auto dev_raw = load_split(c.dev, format, "dev set", "dev");
    if (!c.glove.empty()) require_file(c.glove, "GloVe file");
    if (pools.learning_rates.empty() || pools.l2_lambdas.empty() || pools.batch_sizes.empty() ||
        pools.measurement_counts.empty())
        throw cnm::ConfigError("grid pools must be non-empty");
    const fs::path dir = output_dir(c.out);
    const auto vocab = cnm::build_vocab(std::span(&train_raw, 1));
    const auto train = cnm::encode(train_raw, vocab, base.model.max_length);
    const auto dev = cnm::encode(dev_raw, vocab, base.model.max_length);
    const auto result = cnm::grid_search(train, dev, vocab, base, pools,
                                         max_runs ? std::optional<std::size_t>(max_runs) : std::nullopt, c.glove);
    auto table = open_out(dir / "grid.tsv");
    cnm::write_grid_table(table, result);
    cnm::write_grid_table(std::cout, result);
    return kOk;
}

int cmd_inspect_words(const Common& c, std::size_t top_n) {
    require_file(c.checkpoint, "checkpoint");
    const auto ckpt = cnm::load_checkpoint(c.checkpoint);
    auto out = open_out(output_dir(c.out) / "words.tsv");
    cnm::write_words_report(out, cnm::inspect_words(ckpt, top_n));
    return kOk;
}

int cmd_inspect_match(const Common& c, const std::string& question, const std::string& answer) {
    require_file(c.checkpoint, "checkpoint");
    const auto ckpt = cnm::load_checkpoint(c.checkpoint);
    auto out = open_out(output_dir(c.out) / "match.tsv");
    cnm::write_match_report(out, cnm::inspect_match(ckpt, question, answer));
    return kOk;
}

int cmd_inspect_measurements(const Common& c, std::size_t top_n) {
    require_file(c.checkpoint, "checkpoint");
    const auto ckpt = cnm::load_checkpoint(c.checkpoint);
    auto out = open_out(output_dir(c.out) / "measurements.tsv");
    cnm::write_measurements_report(out, cnm::inspect_measurements(ckpt, top_n));
    return kOk;
}

int cmd_audit(const Common& c, std::size_t trials, const std::vector<std::size_t>& dims) {
    const fs::path dir = output_dir(c.out);
    std::vector<cnm::MetricAuditReport> reports;
    for (const auto& m : cnm::standard_metrics()) reports.push_back(cnm::audit_metric(m, trials, dims, c.seed));
    auto table = open_out(dir / "audit.tsv");
    cnm::write_audit_table(table, reports);
    auto cex = open_out(dir / "counterexamples.tsv");
    cnm::write_counterexamples(cex, reports);
    cnm::write_audit_table(std::cout, reports);
    return kOk;
}

int cmd_synth(const Common& c, const cnm::SyntheticQAConfig& config, std::size_t dev_questions, bool toy) {
    const fs::path dir = output_dir(c.out);
    if (toy) {
        cnm::write_tsv(dir / "toy.tsv", cnm::separable_toy(config.questions, c.seed));
        return kOk;
    }
    auto dev_config = config;
    dev_config.questions = dev_questions;
    cnm::write_tsv(dir / "train.tsv", cnm::synthetic_qa(config, c.seed, "train", "train"));
    cnm::write_tsv(dir / "dev.tsv", cnm::synthetic_qa(dev_config, c.seed + 1000003, "dev", "dev"));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"complex-valued network for matching"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI file with option defaults; command-line flags win");

    Common common;
    TrainFlags flags;
    auto add_common = [&](CLI::App* cmd, bool data, bool checkpoint) {
        if (data) {
            cmd->add_option("--dataset", common.dataset, "TSV dataset");
            cmd->add_option("--format", common.format, "column format descriptor");
        }
        if (checkpoint) cmd->add_option("--checkpoint", common.checkpoint);
        cmd->add_option("--out", common.out, "output directory (created if absent)")->capture_default_str();
        cmd->add_option("--seed", common.seed)->capture_default_str();
    };

    auto* train = app.add_subcommand("train", "train a model, write checkpoint.txt and train_log.jsonl");
    add_common(train, true, false);
    train->add_option("--dev", common.dev, "dev split for model selection");
    train->add_option("--glove", common.glove, "GloVe text file for amplitude init");
    add_trainer_flags(train, flags);

    auto* eval = app.add_subcommand("eval", "score a split, write report.tsv and report.jsonl");
    add_common(eval, true, true);

    cnm::GridPools pools;
    std::size_t max_runs = 0;
    auto* grid = app.add_subcommand("grid", "grid search over the parameter pools, write grid.tsv");
    add_common(grid, true, false);
    grid->add_option("--dev", common.dev, "dev split for model selection");
    grid->add_option("--glove", common.glove);
    add_trainer_flags(grid, flags);
    grid->add_option("--lr-pool", pools.learning_rates)->delimiter(',');
    grid->add_option("--l2-pool", pools.l2_lambdas)->delimiter(',');
    grid->add_option("--batch-pool", pools.batch_sizes)->delimiter(',');
    grid->add_option("--k-pool", pools.measurement_counts)->delimiter(',');
    grid->add_option("--max-runs", max_runs, "train only the first N grid points");

    std::size_t top_n = 10;
    auto* words = app.add_subcommand("inspect-words", "rank words by amplitude norm, write words.tsv");
    add_common(words, false, true);
    words->add_option("--top-n", top_n)->capture_default_str();

    std::string question, answer;
    auto* match = app.add_subcommand("inspect-match", "word weights of the best window pair, write match.tsv");
    add_common(match, false, true);
    match->add_option("--question", question)->required();
    match->add_option("--answer", answer)->required();

    auto* meas = app.add_subcommand("inspect-measurements", "nearest words per measurement, write measurements.tsv");
    add_common(meas, false, true);
    meas->add_option("--top-n", top_n)->capture_default_str();

    std::size_t trials = 10000;
    std::vector<std::size_t> dims{2, 3, 4};
    auto* audit = app.add_subcommand("audit", "metric axiom audit, write audit.tsv and counterexamples.tsv");
    add_common(audit, false, false);
    audit->add_option("--trials", trials)->capture_default_str();
    audit->add_option("--dims", dims)->delimiter(',')->capture_default_str();

    cnm::SyntheticQAConfig synth_config;
    std::size_t dev_questions = 60;
    bool toy = false;
    auto* synth = app.add_subcommand("synth", "write synthetic train.tsv/dev.tsv (or toy.tsv)");
    add_common(synth, false, false);
    synth->add_option("--questions", synth_config.questions)->capture_default_str();
    synth->add_option("--dev-questions", dev_questions)->capture_default_str();
    synth->add_flag("--toy", toy, "single separable toy split");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    }

    try {
        if (*train) return cmd_train(common, flags);
        if (*eval) return cmd_eval(common);
        if (*grid) return cmd_grid(common, flags, pools, max_runs);
        if (*words) return cmd_inspect_words(common, top_n);
        if (*match) return cmd_inspect_match(common, question, answer);
        if (*meas) return cmd_inspect_measurements(common, top_n);
        if (*audit) return cmd_audit(common, trials, dims);
        if (*synth) return cmd_synth(common, synth_config, dev_questions, toy);
    } catch (const cnm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const cnm::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const cnm::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kOther;
    }
    return kOther;
}
