#include "cnm/matcher.hpp"

#include <algorithm>
#include <cmath>

#include "cnm/errors.hpp"

namespace cnm {

void ModelConfig::validate() const {
    if (embedding_dim == 0) throw ConfigError("embedding dimension must be positive");
    if (measurement_count == 0) throw ConfigError("measurement count must be positive");
    if (max_length == 0) throw ConfigError("max sentence length must be positive");
    if (mixture == MixtureKind::local) {
        if (window_sizes.empty()) throw ConfigError("window size list is empty");
        if (!std::is_sorted(window_sizes.begin(), window_sizes.end()) ||
            std::adjacent_find(window_sizes.begin(), window_sizes.end()) != window_sizes.end())
            throw ConfigError("window sizes must be strictly ascending");
        if (window_sizes.front() == 0) throw ConfigError("window sizes must be positive");
    }
}

std::vector<double> dropout_mask(std::size_t count, double drop_rate, std::mt19937_64& rng, bool training) {
    if (!(drop_rate >= 0.0 && drop_rate < 1.0))
        throw ConfigError("dropout rate must lie in [0, 1), got " + std::to_string(drop_rate));
    std::vector<double> mask(count, 1.0);
    if (!training || drop_rate == 0.0) return mask;
    std::bernoulli_distribution drop(drop_rate);
    const double keep_scale = 1.0 / (1.0 - drop_rate);
    for (auto& m : mask) m = drop(rng) ? 0.0 : keep_scale;
    return mask;
}

std::vector<double> apply_dropout(std::span<double> values, double drop_rate, std::mt19937_64& rng,
                                  bool training) {
    auto mask = dropout_mask(values.size(), drop_rate, rng, training);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] *= mask[i];
    return mask;
}

std::vector<double> apply_dropout(std::span<Complex> values, double drop_rate, std::mt19937_64& rng,
                                  bool training) {
    auto mask = dropout_mask(values.size(), drop_rate, rng, training);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] *= mask[i];
    return mask;
}

namespace {

void check_shapes(const ParameterSet& params, const ModelConfig& model) {
    const std::size_t n = model.embedding_dim;
    if (params.amplitudes.cols() != n || params.phases.cols() != n || params.measurements.dim() != n)
        throw ShapeError("parameter tables do not match the embedding dimension");
    if (params.amplitudes.rows() != params.phases.rows())
        throw ShapeError("amplitude and phase tables differ in row count");
    if (params.measurements.count() != model.measurement_count)
        throw ShapeError("measurement set does not match the configured count");
}

// Measurement state as seen by the model: the real part only in the
// real-valued ablation.
Complex measurement_entry(const ParameterSet& params, const ModelConfig& model, std::size_t m,
                          std::size_t j) {
    const Complex v = params.measurements(m, j);
    return model.complex_valued ? v : Complex{v.real(), 0.0};
}

ComplexVector raw_word_vector(std::size_t token, const ParameterSet& params, const ModelConfig& model,
                              std::span<const double> mask) {
    const auto amp = params.amplitudes.row(token);
    const auto phase = params.phases.row(token);
    ComplexVector u(amp.size());
    for (std::size_t j = 0; j < amp.size(); ++j) {
        const double a = amp[j] * mask[j];
        u[j] = model.complex_valued ? std::polar(1.0, phase[j]) * a : Complex{a, 0.0};
    }
    return u;
}

}  // namespace

SentenceTape forward_sentence(std::span<const std::size_t> tokens, const ParameterSet& params,
                              const ModelConfig& model, const DropoutContext* dropout) {
    if (tokens.empty()) throw DegenerateInputError("cannot represent an empty sentence");
    check_shapes(params, model);
    const std::size_t n = model.embedding_dim;
    const std::size_t k = model.measurement_count;
    const std::size_t length = tokens.size();
    const bool training = dropout != nullptr && dropout->rng != nullptr;
    const double rate = training ? dropout->drop_rate : 0.0;

    SentenceTape tape;
    tape.words.reserve(length);
    for (const std::size_t token : tokens) {
        SentenceTape::Word w;
        w.token = token;
        if (training) {
            w.amplitude_mask = dropout_mask(n, rate, *dropout->rng, true);
        } else {
            w.amplitude_mask.assign(n, 1.0);
        }
        w.raw = raw_word_vector(token, params, model, w.amplitude_mask);
        w.degenerate = w.raw.squared_norm() == 0.0;
        w.state = normalize_word(w.raw);
        tape.words.push_back(std::move(w));
    }

    tape.overlaps.assign(k * length, Complex{});
    for (std::size_t m = 0; m < k; ++m)
        for (std::size_t i = 0; i < length; ++i) {
            const auto& w = tape.words[i].state.state;
            Complex z{};
            for (std::size_t j = 0; j < n; ++j) z += std::conj(measurement_entry(params, model, m, j)) * w[j];
            tape.overlaps[m * length + i] = z;
        }

    auto fill_block = [&](SentenceTape::Block& block) {
        auto& p = block.probabilities;
        p.k = k;
        p.windows = block.spans.size();
        p.values.assign(k * p.windows, 0.0);
        for (std::size_t c = 0; c < block.spans.size(); ++c) {
            const auto& span = block.spans[c];
            const auto& weights = block.weights[c];
            for (std::size_t m = 0; m < k; ++m) {
                double s = 0.0;
                for (std::size_t i = span.begin; i < span.end; ++i)
                    s += weights[i - span.begin] * std::norm(tape.overlap(m, i));
                p(m, c) = s;
            }
        }
        block.pooled = max_pool(p);
        tape.pooled.insert(tape.pooled.end(), block.pooled.values.begin(), block.pooled.values.end());
    };

    if (model.mixture == MixtureKind::global) {
        SentenceTape::Block block;
        block.window_length = 0;
        block.spans.push_back({0, length});
        block.weights.emplace_back(length, 1.0 / static_cast<double>(length));
        fill_block(block);
        tape.blocks.push_back(std::move(block));
    } else {
        for (const std::size_t l : model.window_sizes) {
            SentenceTape::Block block;
            block.window_length = l;
            block.spans = window_spans(length, l);
            for (const auto& span : block.spans) {
                std::vector<double> logits;
                for (std::size_t i = span.begin; i < span.end; ++i) logits.push_back(tape.words[i].state.weight);
                block.weights.push_back(softmax(logits));
            }
            fill_block(block);
            tape.blocks.push_back(std::move(block));
        }
    }

    tape.output_mask = training ? dropout_mask(tape.pooled.size(), rate, *dropout->rng, true)
                                : std::vector<double>(tape.pooled.size(), 1.0);
    tape.representation.values.resize(tape.pooled.size());
    for (std::size_t i = 0; i < tape.pooled.size(); ++i)
        tape.representation.values[i] = tape.pooled[i] * tape.output_mask[i];
    return tape;
}

SentenceRepresentation represent(std::span<const std::size_t> tokens, const ParameterSet& params,
                                 const ModelConfig& model) {
    return forward_sentence(tokens, params, model).representation;
}

std::vector<WordState> word_states(std::span<const std::size_t> tokens, const ParameterSet& params,
                                   const ModelConfig& model) {
    check_shapes(params, model);
    const std::vector<double> ones(model.embedding_dim, 1.0);
    std::vector<WordState> out;
    out.reserve(tokens.size());
    for (const auto t : tokens) out.push_back(normalize_word(raw_word_vector(t, params, model, ones)));
    return out;
}

SentenceRepresentation represent_via_density(std::span<const std::size_t> tokens,
                                             const ParameterSet& params, const ModelConfig& model) {
    if (tokens.empty()) throw DegenerateInputError("cannot represent an empty sentence");
    const auto states = word_states(tokens, params, model);

    MeasurementSet effective = params.measurements;
    if (!model.complex_valued)
        for (auto& v : effective.values()) v = Complex{v.real(), 0.0};

    SentenceRepresentation out;
    auto append = [&](const WindowSequence& seq) {
        const auto pooled = max_pool(measure_all(seq, effective));
        out.values.insert(out.values.end(), pooled.values.begin(), pooled.values.end());
    };
    if (model.mixture == MixtureKind::global) {
        WindowSequence seq;
        seq.window_length = tokens.size();
        seq.sentence_length = tokens.size();
        seq.windows.push_back(global_mixture(states));
        append(seq);
    } else {
        for (const std::size_t l : model.window_sizes) append(slide_windows(states, l));
    }
    return out;
}

double cosine(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ShapeError("cosine: length mismatch");
    double dot = 0.0;
    double xx = 0.0;
    double yy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * y[i];
        xx += x[i] * x[i];
        yy += y[i] * y[i];
    }
    if (xx == 0.0 || yy == 0.0) return 0.0;
    return dot / (std::sqrt(xx) * std::sqrt(yy));
}

double score(const SentenceRepresentation& q, const SentenceRepresentation& a) {
    return cosine(q.values, a.values);
}

double triplet_loss(double s_pos, double s_neg, double margin) {
    if (margin < 0.0) throw DomainError("triplet_loss: margin must be non-negative");
    return std::max(0.0, margin - s_pos + s_neg);
}

}  // namespace cnm
