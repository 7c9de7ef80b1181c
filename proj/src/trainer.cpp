#include "cnm/trainer.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cnm/errors.hpp"
#include "cnm/parallel.hpp"

namespace cnm {

namespace {

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
    std::vector<std::uint32_t> words;
    for (const auto p : parts) {
        words.push_back(static_cast<std::uint32_t>(p));
        words.push_back(static_cast<std::uint32_t>(p >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    std::uint64_t out[1];
    std::uint32_t raw[2];
    seq.generate(raw, raw + 2);
    out[0] = (static_cast<std::uint64_t>(raw[0]) << 32) | raw[1];
    return out[0];
}

void check_finite(double x, const char* table, std::size_t r, std::size_t c) {
    if (!std::isfinite(x)) {
        std::ostringstream msg;
        msg << "non-finite update in " << table << "[" << r << "][" << c << "]";
        throw NumericError(msg.str());
    }
}

void project_measurements(ParameterSet& params, const ModelConfig& model) {
    if (!model.complex_valued)
        for (auto& v : params.measurements.values()) v = Complex{v.real(), 0.0};
    params.measurements.normalize_rows();
}

}  // namespace

void TrainerConfig::validate() const {
    model.validate();
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    if (l2_lambda < 0.0) throw ConfigError("l2 lambda must be non-negative");
    if (batch_size == 0) throw ConfigError("batch size must be at least 1");
    if (margin < 0.0) throw ConfigError("margin must be non-negative");
    const double drop = dropout.drop_probability();
    if (!(dropout.rate >= 0.0 && dropout.rate <= 1.0) || !(drop >= 0.0 && drop < 1.0))
        throw ConfigError("dropout drop probability must lie in [0, 1)");
}

ParameterSet init_parameters(const Vocabulary& vocab, const ModelConfig& model, std::uint64_t seed,
                             const std::filesystem::path& glove_file) {
    model.validate();
    std::mt19937_64 rng(derive_seed({seed, 0x616d70}));
    ParameterSet params;
    params.amplitudes = init_amplitudes_from_glove(vocab, glove_file, model.embedding_dim, rng);
    params.phases = model.complex_valued ? init_phases(vocab, model.embedding_dim, derive_seed({seed, 0x706873}))
                                         : PhaseTable(vocab.size(), model.embedding_dim, 0.0);
    params.measurements = init_measurements(model.measurement_count, model.embedding_dim);
    return params;
}

void sgd_step(ParameterSet& params, const GradientSet& grads, const TrainerConfig& config) {
    const double lr = config.learning_rate;
    const std::size_t n = params.amplitudes.cols();
    if (config.l2_lambda != 0.0)
        for (auto& x : params.amplitudes.values()) x -= lr * config.l2_lambda * x;
    for (const auto& [token, row] : grads.amplitude_rows) {
        auto dst = params.amplitudes.row(token);
        for (std::size_t j = 0; j < n; ++j) {
            dst[j] -= lr * row[j];
            check_finite(dst[j], "amplitudes", token, j);
        }
    }
    for (const auto& [token, row] : grads.phase_rows) {
        auto dst = params.phases.row(token);
        for (std::size_t j = 0; j < n; ++j) {
            dst[j] -= lr * row[j];
            check_finite(dst[j], "phases", token, j);
        }
    }
    auto& meas = params.measurements.values();
    if (grads.measurements.size() != meas.size()) throw ShapeError("sgd_step: measurement gradient shape mismatch");
    for (std::size_t i = 0; i < meas.size(); ++i) {
        meas[i] -= lr * grads.measurements[i];
        check_finite(meas[i].real(), "measurements.re", i / n, i % n);
        check_finite(meas[i].imag(), "measurements.im", i / n, i % n);
    }
    project_measurements(params, config.model);
}

Optimizer::Optimizer(const TrainerConfig& config, const ParameterSet& params) : config_(config) {
    if (config_.optimizer == OptimizerKind::adam) {
        m_amp_.assign(params.amplitudes.values().size(), 0.0);
        v_amp_ = m_amp_;
        m_phase_.assign(params.phases.values().size(), 0.0);
        v_phase_ = m_phase_;
        m_meas_.assign(params.measurements.values().size(), Complex{});
        v_meas_ = m_meas_;
    }
}

void Optimizer::step(ParameterSet& params, const GradientSet& grads) {
    if (config_.optimizer == OptimizerKind::sgd) {
        sgd_step(params, grads, config_);
        return;
    }
    ++t_;
    const double b1 = config_.adam_beta1;
    const double b2 = config_.adam_beta2;
    const double lr = config_.learning_rate * std::sqrt(1.0 - std::pow(b2, static_cast<double>(t_))) /
                      (1.0 - std::pow(b1, static_cast<double>(t_)));
    const double eps = config_.adam_epsilon;
    const std::size_t n = params.amplitudes.cols();

    auto update = [&](double& x, double g, double& m, double& v, const char* table, std::size_t idx) {
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g * g;
        x -= lr * m / (std::sqrt(v) + eps);
        check_finite(x, table, idx / n, idx % n);
    };

    auto amp = params.amplitudes.values();
    for (std::size_t i = 0; i < amp.size(); ++i) {
        double g = config_.l2_lambda * amp[i];
        if (auto it = grads.amplitude_rows.find(i / n); it != grads.amplitude_rows.end()) g += it->second[i % n];
        update(amp[i], g, m_amp_[i], v_amp_[i], "amplitudes", i);
    }
    if (config_.model.complex_valued) {
        auto ph = params.phases.values();
        for (std::size_t i = 0; i < ph.size(); ++i) {
            double g = 0.0;
            if (auto it = grads.phase_rows.find(i / n); it != grads.phase_rows.end()) g = it->second[i % n];
            update(ph[i], g, m_phase_[i], v_phase_[i], "phases", i);
        }
    }
    auto& meas = params.measurements.values();
    for (std::size_t i = 0; i < meas.size(); ++i) {
        double re = meas[i].real();
        double im = meas[i].imag();
        double mre = m_meas_[i].real(), mim = m_meas_[i].imag();
        double vre = v_meas_[i].real(), vim = v_meas_[i].imag();
        update(re, grads.measurements[i].real(), mre, vre, "measurements.re", i);
        update(im, grads.measurements[i].imag(), mim, vim, "measurements.im", i);
        meas[i] = {re, im};
        m_meas_[i] = {mre, mim};
        v_meas_[i] = {vre, vim};
    }
    project_measurements(params, config_.model);
}

BatchResult batch_gradient(const EncodedDataset& train, std::span<const Triplet> batch,
                           const ParameterSet& params, const TrainerConfig& config, std::uint64_t stream_seed) {
    const auto& model = config.model;
    std::vector<GradientSet> parts(batch.size());
    std::vector<double> losses(batch.size(), 0.0);
    const double drop = config.dropout.drop_probability();
    parallel_for(batch.size(), [&](std::size_t j) {
        const auto& t = batch[j];
        const auto& q = train.questions.at(t.question);
        TripletTokens tokens{q.tokens, q.candidates.at(t.positive).tokens, q.candidates.at(t.negative).tokens};
        std::mt19937_64 rng(derive_seed({stream_seed, j}));
        DropoutContext ctx{drop, &rng};
        const auto tape = forward_triplet(tokens, params, model, config.margin, drop > 0.0 ? &ctx : nullptr);
        losses[j] = tape.loss;
        parts[j] = backward(tape, params, model);
    });
    BatchResult out;
    out.gradient = GradientSet(model.measurement_count, model.embedding_dim);
    const double w = batch.empty() ? 0.0 : 1.0 / static_cast<double>(batch.size());
    for (std::size_t j = 0; j < batch.size(); ++j) {
        out.gradient.accumulate(parts[j], w);
        out.mean_loss += losses[j] * w;
    }
    if (!out.gradient.all_finite()) throw NumericError("non-finite gradient in batch");
    return out;
}

void write_log_record(std::ostream& out, const EpochRecord& record) {
    nlohmann::json j{{"epoch", record.epoch}, {"batches", record.batches}, {"loss", record.loss}};
    j["dev_map"] = record.dev_map ? nlohmann::json(*record.dev_map) : nlohmann::json(nullptr);
    j["dev_mrr"] = record.dev_mrr ? nlohmann::json(*record.dev_mrr) : nlohmann::json(nullptr);
    out << j.dump() << '\n';
}

TrainResult train(const EncodedDataset& train_split, const EncodedDataset* dev_split, ParameterSet initial,
                  const TrainerConfig& config, const EpochCallback& on_epoch) {
    config.validate();
    TrainResult result;
    ParameterSet params = std::move(initial);
    project_measurements(params, config.model);
    Optimizer optimizer(config, params);
    const bool have_dev = dev_split != nullptr && !dev_split->questions.empty();
    result.best_dev_map = -1.0;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto sample = sample_triplets(train_split, derive_seed({config.seed, epoch, 0x747269}));
        if (sample.triplets.empty()) throw DataError("training split yields no (question, positive, negative) triplet");
        const auto batches = make_batches(sample.triplets, config.batch_size);
        double loss_sum = 0.0;
        for (std::size_t b = 0; b < batches.size(); ++b) {
            const auto batch = batch_gradient(train_split, batches[b], params, config,
                                              derive_seed({config.seed, epoch, b, 0x647270}));
            optimizer.step(params, batch.gradient);
            loss_sum += batch.mean_loss * static_cast<double>(batches[b].size());
        }
        EpochRecord record;
        record.epoch = epoch;
        record.batches = batches.size();
        record.loss = loss_sum / static_cast<double>(sample.triplets.size());
        if (have_dev) {
            const auto report = evaluate(params, config.model, *dev_split);
            record.dev_map = report.map;
            record.dev_mrr = report.mrr;
            if (report.map > result.best_dev_map) {
                result.best_dev_map = report.map;
                result.best_epoch = epoch;
                result.best = params;
            }
        }
        result.log.push_back(record);
        if (on_epoch) on_epoch(record);
    }
    if (!have_dev || config.epochs == 0) {
        result.best = std::move(params);
        result.best_epoch = config.epochs;
        result.best_dev_map = have_dev ? evaluate(result.best, config.model, *dev_split).map : 0.0;
    }
    return result;
}

std::vector<TrainerConfig> enumerate_grid(const TrainerConfig& base, const GridPools& pools) {
    std::vector<TrainerConfig> out;
    for (const double lr : pools.learning_rates)
        for (const double l2 : pools.l2_lambdas)
            for (const std::size_t bs : pools.batch_sizes)
                for (const std::size_t k : pools.measurement_counts) {
                    TrainerConfig c = base;
                    c.learning_rate = lr;
                    c.l2_lambda = l2;
                    c.batch_size = bs;
                    c.model.measurement_count = k;
                    out.push_back(c);
                }
    return out;
}

GridResult grid_search(const EncodedDataset& train_split, const EncodedDataset& dev_split, const Vocabulary& vocab,
                       const TrainerConfig& base, const GridPools& pools, std::optional<std::size_t> max_runs,
                       const std::filesystem::path& glove_file) {
    auto configs = enumerate_grid(base, pools);
    if (max_runs && *max_runs < configs.size()) configs.resize(*max_runs);
    GridResult result;
    for (const auto& config : configs) {
        auto trained = train(train_split, &dev_split, init_parameters(vocab, config.model, config.seed, glove_file),
                             config);
        const auto report = evaluate(trained.best, config.model, dev_split);
        result.rows.push_back({config, report.map, report.mrr, trained.best_epoch});
        if (report.map > result.rows[result.best].dev_map) result.best = result.rows.size() - 1;
    }
    return result;
}

void write_grid_table(std::ostream& out, const GridResult& result) {
    out << "run\tlearning_rate\tl2_lambda\tbatch_size\tmeasurements\tbest_epoch\tdev_map\tdev_mrr\tbest\n";
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const auto& r = result.rows[i];
        out << i << '\t' << r.config.learning_rate << '\t' << r.config.l2_lambda << '\t' << r.config.batch_size << '\t'
            << r.config.model.measurement_count << '\t' << r.best_epoch << '\t' << std::setprecision(6) << r.dev_map
            << '\t' << r.dev_mrr << '\t' << (i == result.best ? "*" : "") << '\n';
    }
}

}  // namespace cnm
