#include "cnm/inspect.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "cnm/errors.hpp"

namespace cnm {

std::vector<WordImportance> inspect_words(const Checkpoint& c, std::size_t top_n) {
    validate_checkpoint(c);
    std::vector<WordImportance> out;
    for (std::size_t i = 0; i < c.vocab.size(); ++i) {
        double s = 0.0;
        for (const double x : c.params.amplitudes.row(i)) s += x * x;
        out.push_back({c.vocab.token(i), i, std::sqrt(s)});
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.norm > b.norm; });
    out.resize(std::min(top_n, out.size()));
    return out;
}

namespace {

std::vector<std::size_t> encode_text(const Checkpoint& c, const std::string& text, const char* what) {
    auto tokens = tokenize(text);
    if (tokens.empty()) throw DegenerateInputError(std::string(what) + " has no tokens");
    if (tokens.size() > c.model.max_length) tokens.resize(c.model.max_length);
    return c.vocab.encode(tokens);
}

std::vector<WeightedWord> window_words(const Checkpoint& c, std::span<const std::size_t> tokens,
                                       const SentenceTape::Block& block, std::size_t window) {
    const auto& span = block.spans[window];
    std::vector<WeightedWord> out;
    for (std::size_t i = span.begin; i < span.end; ++i)
        out.push_back({c.vocab.token(tokens[i]), block.weights[window][i - span.begin]});
    return out;
}

}  // namespace

constexpr double kTieTolerance = 1e-12;

MatchInspection inspect_match(const Checkpoint& c, const std::string& question, const std::string& answer) {
    validate_checkpoint(c);
    const auto q = encode_text(c, question, "question");
    const auto a = encode_text(c, answer, "answer");
    const auto tq = forward_sentence(q, c.params, c.model);
    const auto ta = forward_sentence(a, c.params, c.model);
    const std::size_t k = c.model.measurement_count;

    MatchInspection best;
    bool found = false;
    std::vector<double> x(k), y(k);
    for (std::size_t b = 0; b < tq.blocks.size(); ++b) {
        const auto& bq = tq.blocks[b];
        const auto& ba = ta.blocks[b];
        for (std::size_t i = 0; i < bq.spans.size(); ++i)
            for (std::size_t j = 0; j < ba.spans.size(); ++j) {
                for (std::size_t m = 0; m < k; ++m) {
                    x[m] = bq.probabilities(m, i);
                    y[m] = ba.probabilities(m, j);
                }
                const double s = cosine(x, y);
                // Repeated words give cosine ties that differ only by rounding.
                if (found && !(s > best.similarity + kTieTolerance)) continue;
                found = true;
                best.window_length = bq.window_length;
                best.question_window = bq.spans[i];
                best.answer_window = ba.spans[j];
                best.similarity = s;
                best.question_words = window_words(c, q, bq, i);
                best.answer_words = window_words(c, a, ba, j);
            }
    }
    return best;
}

std::vector<std::vector<Neighbour>> inspect_measurements(const Checkpoint& c, std::size_t top_n) {
    validate_checkpoint(c);
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < c.vocab.size(); ++i) {
        const auto& t = c.vocab.token(i);
        if (t != kPadToken && t != kOovToken) candidates.push_back(i);
    }
    const auto states = word_states(candidates, c.params, c.model);
    const std::size_t n = c.model.embedding_dim;
    std::vector<std::vector<Neighbour>> out;
    for (std::size_t m = 0; m < c.params.measurements.count(); ++m) {
        ComplexVector v = c.params.measurements.row(m);
        if (!c.model.complex_valued)
            for (auto& e : v) e = Complex{e.real(), 0.0};
        const double norm = v.norm();
        std::vector<Neighbour> list;
        for (std::size_t w = 0; w < candidates.size(); ++w) {
            Complex z{};
            for (std::size_t j = 0; j < n; ++j) z += std::conj(v[j]) * states[w].state[j];
            list.push_back({c.vocab.token(candidates[w]), candidates[w], norm > 0.0 ? std::abs(z) / norm : 0.0});
        }
        std::stable_sort(list.begin(), list.end(),
                         [](const auto& a, const auto& b) { return a.similarity > b.similarity; });
        list.resize(std::min(top_n, list.size()));
        out.push_back(std::move(list));
    }
    return out;
}

void write_words_report(std::ostream& out, const std::vector<WordImportance>& words) {
    out << "rank\ttoken\tindex\tnorm\n";
    out << std::setprecision(10);
    for (std::size_t r = 0; r < words.size(); ++r)
        out << r + 1 << '\t' << words[r].token << '\t' << words[r].index << '\t' << words[r].norm << '\n';
}

void write_match_report(std::ostream& out, const MatchInspection& match) {
    out << "side\twindow_length\tbegin\tend\tposition\ttoken\tweight\n";
    out << std::setprecision(10);
    auto side = [&](const char* name, const WindowSpan& span, const std::vector<WeightedWord>& words) {
        for (std::size_t i = 0; i < words.size(); ++i)
            out << name << '\t' << match.window_length << '\t' << span.begin << '\t' << span.end << '\t'
                << span.begin + i << '\t' << words[i].token << '\t' << words[i].weight << '\n';
    };
    side("question", match.question_window, match.question_words);
    side("answer", match.answer_window, match.answer_words);
}

void write_measurements_report(std::ostream& out, const std::vector<std::vector<Neighbour>>& lists) {
    out << "measurement\trank\ttoken\tindex\tsimilarity\n";
    out << std::setprecision(10);
    for (std::size_t m = 0; m < lists.size(); ++m)
        for (std::size_t r = 0; r < lists[m].size(); ++r)
            out << m << '\t' << r + 1 << '\t' << lists[m][r].token << '\t' << lists[m][r].index << '\t'
                << lists[m][r].similarity << '\n';
}

}  // namespace cnm
