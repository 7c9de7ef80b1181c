#include "cnm/autograd.hpp"

#include <cmath>

#include "cnm/errors.hpp"

namespace cnm {

std::vector<double>& GradientSet::amplitude_row(std::size_t token) {
    auto [it, inserted] = amplitude_rows.try_emplace(token);
    if (inserted) it->second.assign(dim, 0.0);
    return it->second;
}

std::vector<double>& GradientSet::phase_row(std::size_t token) {
    auto [it, inserted] = phase_rows.try_emplace(token);
    if (inserted) it->second.assign(dim, 0.0);
    return it->second;
}

void GradientSet::accumulate(const GradientSet& other, double factor) {
    if (dim == 0) dim = other.dim;
    if (measurements.empty()) measurements.assign(other.measurements.size(), Complex{});
    if (other.dim != dim || other.measurements.size() != measurements.size())
        throw ShapeError("GradientSet::accumulate: shape mismatch");
    for (const auto& [token, row] : other.amplitude_rows) {
        auto& dst = amplitude_row(token);
        for (std::size_t j = 0; j < dim; ++j) dst[j] += factor * row[j];
    }
    for (const auto& [token, row] : other.phase_rows) {
        auto& dst = phase_row(token);
        for (std::size_t j = 0; j < dim; ++j) dst[j] += factor * row[j];
    }
    for (std::size_t i = 0; i < measurements.size(); ++i) measurements[i] += factor * other.measurements[i];
}

void GradientSet::scale(double factor) {
    for (auto& [_, row] : amplitude_rows)
        for (auto& g : row) g *= factor;
    for (auto& [_, row] : phase_rows)
        for (auto& g : row) g *= factor;
    for (auto& g : measurements) g *= factor;
}

bool GradientSet::all_finite() const {
    for (const auto& [_, row] : amplitude_rows)
        for (double g : row)
            if (!std::isfinite(g)) return false;
    for (const auto& [_, row] : phase_rows)
        for (double g : row)
            if (!std::isfinite(g)) return false;
    for (const auto& g : measurements)
        if (!std::isfinite(g.real()) || !std::isfinite(g.imag())) return false;
    return true;
}

bool GradientSet::is_zero() const {
    for (const auto& [_, row] : amplitude_rows)
        for (double g : row)
            if (g != 0.0) return false;
    for (const auto& [_, row] : phase_rows)
        for (double g : row)
            if (g != 0.0) return false;
    for (const auto& g : measurements)
        if (g != Complex{}) return false;
    return true;
}

TripletTape forward_triplet(const TripletTokens& triplet, const ParameterSet& params,
                            const ModelConfig& model, double margin, const DropoutContext* dropout) {
    TripletTape tape;
    tape.question = forward_sentence(triplet.question, params, model, dropout);
    tape.positive = forward_sentence(triplet.positive, params, model, dropout);
    tape.negative = forward_sentence(triplet.negative, params, model, dropout);
    tape.score_positive = score(tape.question.representation, tape.positive.representation);
    tape.score_negative = score(tape.question.representation, tape.negative.representation);
    tape.margin = margin;
    tape.loss = triplet_loss(tape.score_positive, tape.score_negative, margin);
    return tape;
}

std::vector<double> cosine_gradient(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ShapeError("cosine_gradient: length mismatch");
    double xx = 0.0;
    double yy = 0.0;
    double dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xx += x[i] * x[i];
        yy += y[i] * y[i];
        dot += x[i] * y[i];
    }
    std::vector<double> g(x.size(), 0.0);
    if (xx == 0.0 || yy == 0.0) return g;
    const double nx = std::sqrt(xx);
    const double ny = std::sqrt(yy);
    const double cos = dot / (nx * ny);
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = y[i] / (nx * ny) - cos * x[i] / xx;
    return g;
}

void backward_sentence(const SentenceTape& tape, std::span<const double> d_representation,
                       const ParameterSet& params, const ModelConfig& model, GradientSet& grads) {
    const std::size_t n = model.embedding_dim;
    const std::size_t k = model.measurement_count;
    const std::size_t length = tape.words.size();
    if (d_representation.size() != tape.pooled.size())
        throw ShapeError("backward_sentence: upstream gradient has the wrong length");
    if (grads.measurements.size() != k * n) throw ShapeError("backward_sentence: gradient set has the wrong shape");

    // Real-gradient convention: for a complex quantity x, G_x = dL/dRe x + i dL/dIm x.
    std::vector<ComplexVector> g_state(length, ComplexVector(n));
    std::vector<double> g_weight(length, 0.0);

    auto measurement = [&](std::size_t m, std::size_t j) {
        const Complex v = params.measurements(m, j);
        return model.complex_valued ? v : Complex{v.real(), 0.0};
    };

    std::size_t offset = 0;
    for (const auto& block : tape.blocks) {
        const bool softmax_weights = model.mixture == MixtureKind::local;
        for (std::size_t m = 0; m < k; ++m) {
            const double g = d_representation[offset + m] * tape.output_mask[offset + m];
            if (g == 0.0) continue;
            const std::size_t c = block.pooled.argmax[m];
            const auto& span = block.spans[c];
            const auto& weights = block.weights[c];
            const double prob = block.probabilities(m, c);
            for (std::size_t i = span.begin; i < span.end; ++i) {
                const double p = weights[i - span.begin];
                const Complex z = tape.overlap(m, i);
                if (softmax_weights) g_weight[i] += g * p * (std::norm(z) - prob);
                // d|z|^2 with z = <v|w>: G_w = 2 z v, G_v = 2 conj(z) w.
                const auto& w = tape.words[i].state.state;
                const double gp = 2.0 * g * p;
                for (std::size_t j = 0; j < n; ++j) {
                    g_state[i][j] += gp * z * measurement(m, j);
                    grads.measurements[m * n + j] += gp * std::conj(z) * w[j];
                }
            }
        }
        offset += block.pooled.values.size();
    }

    if (!model.complex_valued)
        for (auto& g : grads.measurements) g = Complex{g.real(), 0.0};

    for (std::size_t i = 0; i < length; ++i) {
        const auto& word = tape.words[i];
        if (word.degenerate) continue;
        const auto& w = word.state.state;
        const auto& gw = g_state[i];
        // w = u / ||u||, pi = ||u||.
        double radial = 0.0;
        for (std::size_t j = 0; j < n; ++j) radial += (std::conj(w[j]) * gw[j]).real();
        const double inv_norm = 1.0 / word.state.weight;
        auto& g_amp = grads.amplitude_row(word.token);
        std::vector<double>* g_phase = model.complex_valued ? &grads.phase_row(word.token) : nullptr;
        const auto phases = params.phases.row(word.token);
        for (std::size_t j = 0; j < n; ++j) {
            const Complex gu = (gw[j] - radial * w[j]) * inv_norm + g_weight[i] * w[j];
            if (model.complex_valued) {
                // u_j = a_j e^{i phi_j}, a_j = R_j * mask_j.
                const Complex unit = std::polar(1.0, phases[j]);
                g_amp[j] += word.amplitude_mask[j] * (std::conj(unit) * gu).real();
                (*g_phase)[j] += (std::conj(Complex{0.0, 1.0} * word.raw[j]) * gu).real();
            } else {
                g_amp[j] += word.amplitude_mask[j] * gu.real();
            }
        }
    }
}

GradientSet backward(const TripletTape& tape, const ParameterSet& params, const ModelConfig& model) {
    GradientSet grads(model.measurement_count, model.embedding_dim);
    if (!(tape.loss > 0.0)) return grads;

    const auto& q = tape.question.representation.values;
    const auto& pos = tape.positive.representation.values;
    const auto& neg = tape.negative.representation.values;

    // loss = margin - cos(q, pos) + cos(q, neg)
    auto d_pos_q = cosine_gradient(q, pos);
    auto d_neg_q = cosine_gradient(q, neg);
    std::vector<double> d_q(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) d_q[i] = -d_pos_q[i] + d_neg_q[i];
    auto d_pos = cosine_gradient(pos, q);
    for (auto& g : d_pos) g = -g;
    auto d_neg = cosine_gradient(neg, q);

    backward_sentence(tape.question, d_q, params, model, grads);
    backward_sentence(tape.positive, d_pos, params, model, grads);
    backward_sentence(tape.negative, d_neg, params, model, grads);
    return grads;
}

}  // namespace cnm
