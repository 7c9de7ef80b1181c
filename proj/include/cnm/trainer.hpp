#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cnm/autograd.hpp"
#include "cnm/data_io.hpp"
#include "cnm/evaluation.hpp"
#include "cnm/matcher.hpp"

namespace cnm {

enum class OptimizerKind { sgd, adam };

struct TrainerConfig {
    ModelConfig model;
    double learning_rate = 0.05;
    double l2_lambda = 1e-6;  // amplitude table only
    std::size_t batch_size = 16;
    double margin = 0.1;
    DropoutConfig dropout{0.9, false};
    std::size_t epochs = 20;
    std::uint64_t seed = 1;
    OptimizerKind optimizer = OptimizerKind::sgd;
    // Adam moments.
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;

    void validate() const;
};

// R from GloVe (or uniform(-0.25, 0.25)), Phi uniform(-pi, pi) (all zeros
// for the real-valued ablation), measurements one-hot.
ParameterSet init_parameters(const Vocabulary& vocab, const ModelConfig& model, std::uint64_t seed,
                             const std::filesystem::path& glove_file = {});

// theta <- theta - lr * (g + l2 * theta) on amplitudes, theta - lr * g on
// phases and measurements, then measurement rows are renormalized. A
// non-finite result raises NumericError naming the parameter.
void sgd_step(ParameterSet& params, const GradientSet& grads, const TrainerConfig& config);

class Optimizer {
public:
    Optimizer(const TrainerConfig& config, const ParameterSet& params);
    void step(ParameterSet& params, const GradientSet& grads);

private:
    TrainerConfig config_;
    std::size_t t_ = 0;
    std::vector<double> m_amp_, v_amp_, m_phase_, v_phase_;
    std::vector<Complex> m_meas_, v_meas_;
};

// Mean loss and gradient over a batch. Triplet j uses a dropout stream
// seeded from (stream_seed, j), so the result does not depend on how the
// batch is split across threads.
struct BatchResult {
    GradientSet gradient;
    double mean_loss = 0.0;
};
BatchResult batch_gradient(const EncodedDataset& train, std::span<const Triplet> batch,
                           const ParameterSet& params, const TrainerConfig& config, std::uint64_t stream_seed);

struct EpochRecord {
    std::size_t epoch = 0;
    std::size_t batches = 0;
    double loss = 0.0;
    std::optional<double> dev_map;
    std::optional<double> dev_mrr;
};

void write_log_record(std::ostream& out, const EpochRecord& record);

struct TrainResult {
    ParameterSet best;
    std::vector<EpochRecord> log;
    std::size_t best_epoch = 0;
    double best_dev_map = 0.0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Epochs of shuffled triplet batches. With a dev split the parameters of the
// best dev-MAP epoch are returned, otherwise the final ones. Throws
// DataError when the training split yields no triplet.
TrainResult train(const EncodedDataset& train_split, const EncodedDataset* dev_split, ParameterSet initial,
                  const TrainerConfig& config, const EpochCallback& on_epoch = {});

struct GridPools {
    std::vector<double> learning_rates{0.01, 0.05, 0.1};
    std::vector<double> l2_lambdas{1e-5, 1e-6, 1e-7, 1e-8};
    std::vector<std::size_t> batch_sizes{8, 16, 32};
    std::vector<std::size_t> measurement_counts{50, 100, 300, 500};
};

// Cartesian product in a fixed order (learning rate outermost, measurement
// count innermost).
std::vector<TrainerConfig> enumerate_grid(const TrainerConfig& base, const GridPools& pools);

struct GridRow {
    TrainerConfig config;
    double dev_map = 0.0;
    double dev_mrr = 0.0;
    std::size_t best_epoch = 0;
};

struct GridResult {
    std::vector<GridRow> rows;
    std::size_t best = 0;
};

// Trains one model per grid point (the first `max_runs` when given) and
// selects the highest dev MAP (earliest row on ties).
GridResult grid_search(const EncodedDataset& train_split, const EncodedDataset& dev_split,
                       const Vocabulary& vocab, const TrainerConfig& base, const GridPools& pools,
                       std::optional<std::size_t> max_runs = std::nullopt,
                       const std::filesystem::path& glove_file = {});

void write_grid_table(std::ostream& out, const GridResult& result);

}  // namespace cnm
