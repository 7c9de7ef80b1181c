#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cnm/complex_core.hpp"

namespace cnm {

inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kOovToken = "<oov>";
inline constexpr std::size_t kPadIndex = 0;
inline constexpr std::size_t kOovIndex = 1;

// Lowercases, splits on whitespace and strips leading/trailing ASCII
// punctuation from each piece. Pieces that become empty are dropped. No
// stemming.
std::vector<std::string> tokenize(std::string_view text);

// Bijective token <-> index map. Vocabularies built for a model start with
// the padding token at index 0 and the out-of-vocabulary token at index 1.
class Vocabulary {
public:
    Vocabulary() = default;
    static Vocabulary with_reserved_tokens();

    // Appends `token` if absent; returns its index either way.
    std::size_t add(const std::string& token);

    bool contains(const std::string& token) const;
    // Index of `token`, or kOovIndex when unknown (LookupError if the
    // vocabulary has no reserved tokens).
    std::size_t encode(const std::string& token) const;
    std::vector<std::size_t> encode(std::span<const std::string> tokens) const;
    // Throws LookupError for an out-of-range index.
    const std::string& token(std::size_t index) const;

    std::size_t size() const noexcept { return tokens_.size(); }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Dense |V| x n table of reals. Backs both the amplitude table R and the
// phase table Phi.
class RealTable {
public:
    RealTable() = default;
    RealTable(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    // Throws LookupError for an out-of-range row.
    std::span<double> row(std::size_t r);
    std::span<const double> row(std::size_t r) const;

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    friend bool operator==(const RealTable&, const RealTable&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

using AmplitudeTable = RealTable;
using PhaseTable = RealTable;

// Unit superposition state plus the word-dependent weight pi(w) = ||raw||.
struct WordState {
    ComplexVector state;
    double weight = 0.0;
};

// Weight assigned to the uniform fallback state of a zero raw vector.
inline constexpr double kDegenerateWeight = 1e-8;

// Element j = R[w][j] * exp(i Phi[w][j]).
ComplexVector assemble_word_vector(std::size_t word_index, const AmplitudeTable& amplitudes,
                                   const PhaseTable& phases);

// Splits v into direction and length. A zero vector maps to the uniform
// state (1/sqrt(n) everywhere) with weight kDegenerateWeight; an empty vector
// throws DegenerateInputError.
WordState normalize_word(const ComplexVector& v);

// Amplitude table for `vocab`: in-vocabulary GloVe rows are copied, every
// other row is drawn from uniform(-0.25, 0.25), and the padding row is set to
// a constant vector of norm 1e-8. Pass an empty path to skip the file.
//
// The file holds one token per line followed by `dim` space separated
// floats. A malformed line raises ParseError with its line number; a line
// with the wrong number of values raises ConfigError.
AmplitudeTable init_amplitudes_from_glove(const Vocabulary& vocab,
                                          const std::filesystem::path& glove_file,
                                          std::size_t dim, std::mt19937_64& rng);

// Uniform(-pi, pi) phases; deterministic for a fixed seed.
PhaseTable init_phases(const Vocabulary& vocab, std::size_t dim, std::uint64_t seed);

}  // namespace cnm
