#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "cnm/complex_core.hpp"
#include "cnm/embedding.hpp"
#include "cnm/measurement.hpp"
#include "cnm/mixture.hpp"

namespace cnm {

enum class MixtureKind { local, global };

struct ModelConfig {
    std::size_t embedding_dim = 50;
    std::size_t measurement_count = 50;
    std::vector<std::size_t> window_sizes{1, 2, 3, 4};
    MixtureKind mixture = MixtureKind::local;
    // false selects the real-valued ablation: phases are ignored and only the
    // real part of each measurement state is used.
    bool complex_valued = true;
    std::size_t max_length = 40;

    std::size_t representation_size() const noexcept {
        return mixture == MixtureKind::global ? measurement_count
                                              : measurement_count * window_sizes.size();
    }

    // Throws ConfigError on an unusable combination.
    void validate() const;
};

// Theta = {R, Phi, {|v_i>}}.
struct ParameterSet {
    AmplitudeTable amplitudes;
    PhaseTable phases;
    MeasurementSet measurements;
};

// Pooled measurement probabilities, concatenated over window sizes in
// ascending order.
struct SentenceRepresentation {
    std::vector<double> values;
};

// Dropout on the amplitude rows at lookup time and on the pooled probability
// vector. `rate` is the drop probability unless `rate_is_keep_probability`.
struct DropoutConfig {
    double rate = 0.0;
    bool rate_is_keep_probability = false;

    double drop_probability() const noexcept { return rate_is_keep_probability ? 1.0 - rate : rate; }
};

// Inverted dropout multipliers: 0 with probability `drop_rate`, otherwise
// 1 / (1 - drop_rate). All ones when not training. Throws ConfigError unless
// 0 <= drop_rate < 1.
std::vector<double> dropout_mask(std::size_t count, double drop_rate, std::mt19937_64& rng, bool training);

// Applies a fresh mask in place and returns it.
std::vector<double> apply_dropout(std::span<double> values, double drop_rate, std::mt19937_64& rng,
                                  bool training);
// One real multiplier per complex element, so phases are preserved.
std::vector<double> apply_dropout(std::span<Complex> values, double drop_rate, std::mt19937_64& rng,
                                  bool training);

// Everything the backward pass needs from one sentence's forward pass.
struct SentenceTape {
    struct Word {
        std::size_t token = 0;
        ComplexVector raw;               // after the amplitude dropout mask
        WordState state;
        std::vector<double> amplitude_mask;
        bool degenerate = false;         // zero raw vector, fallback state
    };
    struct Block {
        std::size_t window_length = 0;   // 0 for the global mixture
        std::vector<WindowSpan> spans;
        std::vector<std::vector<double>> weights;  // mixture weights per window
        ProbabilityMatrix probabilities;
        PooledVector pooled;
    };

    std::vector<Word> words;
    std::vector<Complex> overlaps;       // <v_m|w_i>, row-major k x L
    std::vector<Block> blocks;
    std::vector<double> pooled;          // concatenated, before output dropout
    std::vector<double> output_mask;
    SentenceRepresentation representation;

    Complex overlap(std::size_t m, std::size_t i) const { return overlaps[m * words.size() + i]; }
};

// Optional randomness for a training-mode forward pass.
struct DropoutContext {
    double drop_rate = 0.0;
    std::mt19937_64* rng = nullptr;
};

// Factored forward pass: <v|rho|v> = sum_i p_i |<v|w_i>|^2, never forming rho.
// Throws DegenerateInputError on an empty token list.
SentenceTape forward_sentence(std::span<const std::size_t> tokens, const ParameterSet& params,
                              const ModelConfig& model, const DropoutContext* dropout = nullptr);

// Eval-mode representation (no dropout).
SentenceRepresentation represent(std::span<const std::size_t> tokens, const ParameterSet& params,
                                 const ModelConfig& model);

// Literal pipeline: word states -> density matrices -> measure_all ->
// max_pool. Slow; serves as the reference for represent().
SentenceRepresentation represent_via_density(std::span<const std::size_t> tokens,
                                             const ParameterSet& params, const ModelConfig& model);

// Cosine similarity; 0 when either operand is the zero vector. Throws
// ShapeError on a length mismatch.
double score(const SentenceRepresentation& q, const SentenceRepresentation& a);
double cosine(std::span<const double> x, std::span<const double> y);

// max(0, margin - s_pos + s_neg). Throws DomainError for a negative margin.
double triplet_loss(double s_pos, double s_neg, double margin);

// Word states for a token list, as used by the forward pass in eval mode.
std::vector<WordState> word_states(std::span<const std::size_t> tokens, const ParameterSet& params,
                                   const ModelConfig& model);

}  // namespace cnm
