#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "cnm/matcher.hpp"

namespace cnm {

// Gradient of a scalar loss with respect to Theta. Amplitude and phase
// gradients are stored per touched vocabulary row; rows absent from the map
// have exactly zero gradient. Measurement gradients pack d/dRe into the real
// part and d/dIm into the imaginary part of each entry.
struct GradientSet {
    std::size_t dim = 0;
    std::map<std::size_t, std::vector<double>> amplitude_rows;
    std::map<std::size_t, std::vector<double>> phase_rows;
    std::vector<Complex> measurements;

    GradientSet() = default;
    GradientSet(std::size_t measurement_count, std::size_t embedding_dim)
        : dim(embedding_dim), measurements(measurement_count * embedding_dim) {}

    std::vector<double>& amplitude_row(std::size_t token);
    std::vector<double>& phase_row(std::size_t token);

    // this += scale * other, in a deterministic order.
    void accumulate(const GradientSet& other, double scale = 1.0);
    void scale(double factor);
    bool all_finite() const;
    bool is_zero() const;
};

struct TripletTokens {
    std::span<const std::size_t> question;
    std::span<const std::size_t> positive;
    std::span<const std::size_t> negative;
};

struct TripletTape {
    SentenceTape question;
    SentenceTape positive;
    SentenceTape negative;
    double score_positive = 0.0;
    double score_negative = 0.0;
    double margin = 0.0;
    double loss = 0.0;
};

TripletTape forward_triplet(const TripletTokens& triplet, const ParameterSet& params,
                            const ModelConfig& model, double margin,
                            const DropoutContext* dropout = nullptr);

// Exact gradient of the triplet hinge loss recorded in `tape`. The hinge
// kink (loss exactly 0) takes subgradient 0.
GradientSet backward(const TripletTape& tape, const ParameterSet& params, const ModelConfig& model);

// Accumulates d(loss)/d(theta) into `grads`, given d(loss)/d(representation).
void backward_sentence(const SentenceTape& tape, std::span<const double> d_representation,
                       const ParameterSet& params, const ModelConfig& model, GradientSet& grads);

// d cos(x, y) / dx; zero when either operand is the zero vector.
std::vector<double> cosine_gradient(std::span<const double> x, std::span<const double> y);

}  // namespace cnm
