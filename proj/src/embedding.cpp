#include "cnm/embedding.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cnm/errors.hpp"

namespace cnm {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        std::size_t b = i;
        std::size_t e = j;
        while (b < e && std::ispunct(static_cast<unsigned char>(text[b]))) ++b;
        while (e > b && std::ispunct(static_cast<unsigned char>(text[e - 1]))) --e;
        if (b < e) {
            std::string token(text.substr(b, e - b));
            for (auto& ch : token) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
            out.push_back(std::move(token));
        }
        i = j;
    }
    return out;
}

Vocabulary Vocabulary::with_reserved_tokens() {
    Vocabulary v;
    v.add(std::string(kPadToken));
    v.add(std::string(kOovToken));
    return v;
}

std::size_t Vocabulary::add(const std::string& token) {
    if (auto it = index_.find(token); it != index_.end()) return it->second;
    const std::size_t idx = tokens_.size();
    tokens_.push_back(token);
    index_.emplace(token, idx);
    return idx;
}

bool Vocabulary::contains(const std::string& token) const { return index_.count(token) != 0; }

std::size_t Vocabulary::encode(const std::string& token) const {
    if (auto it = index_.find(token); it != index_.end()) return it->second;
    if (tokens_.size() <= kOovIndex || tokens_[kOovIndex] != kOovToken)
        throw LookupError("vocabulary has no out-of-vocabulary entry for '" + token + "'");
    return kOovIndex;
}

std::vector<std::size_t> Vocabulary::encode(std::span<const std::string> tokens) const {
    std::vector<std::size_t> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(encode(t));
    return out;
}

const std::string& Vocabulary::token(std::size_t index) const {
    if (index >= tokens_.size())
        throw LookupError("vocabulary index " + std::to_string(index) + " out of range");
    return tokens_[index];
}

std::span<double> RealTable::row(std::size_t r) {
    if (r >= rows_) throw LookupError("table row " + std::to_string(r) + " out of range");
    return {data_.data() + r * cols_, cols_};
}

std::span<const double> RealTable::row(std::size_t r) const {
    if (r >= rows_) throw LookupError("table row " + std::to_string(r) + " out of range");
    return {data_.data() + r * cols_, cols_};
}

ComplexVector assemble_word_vector(std::size_t word_index, const AmplitudeTable& amplitudes,
                                   const PhaseTable& phases) {
    if (amplitudes.cols() != phases.cols() || amplitudes.rows() != phases.rows())
        throw ShapeError("assemble_word_vector: amplitude/phase tables differ in shape");
    const auto r = amplitudes.row(word_index);
    const auto phi = phases.row(word_index);
    ComplexVector v(r.size());
    for (std::size_t j = 0; j < r.size(); ++j) v[j] = std::polar(1.0, phi[j]) * r[j];
    return v;
}

WordState normalize_word(const ComplexVector& v) {
    if (v.empty()) throw DegenerateInputError("normalize_word: empty vector");
    const double norm = v.norm();
    if (norm == 0.0) {
        const double u = 1.0 / std::sqrt(static_cast<double>(v.dim()));
        return {ComplexVector(v.dim(), Complex{u, 0.0}), kDegenerateWeight};
    }
    if (!std::isfinite(norm)) throw NumericError("normalize_word: non-finite norm");
    ComplexVector state = v;
    state *= 1.0 / norm;
    return {std::move(state), norm};
}

AmplitudeTable init_amplitudes_from_glove(const Vocabulary& vocab,
                                          const std::filesystem::path& glove_file,
                                          std::size_t dim, std::mt19937_64& rng) {
    if (dim == 0) throw ConfigError("embedding dimension must be positive");
    AmplitudeTable table(vocab.size(), dim);
    std::uniform_real_distribution<double> oov(-0.25, 0.25);
    for (auto& x : table.values()) x = oov(rng);

    if (!glove_file.empty()) {
        std::ifstream in(glove_file);
        if (!in) throw ConfigError("cannot open GloVe file " + glove_file.string());
        std::string line;
        std::size_t line_no = 0;
        std::vector<double> values;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            std::istringstream fields(line);
            std::string token;
            fields >> token;
            values.clear();
            std::string field;
            while (fields >> field) {
                double x = 0.0;
                const auto* first = field.data();
                const auto* last = field.data() + field.size();
                auto [ptr, ec] = std::from_chars(first, last, x);
                if (ec != std::errc{} || ptr != last || !std::isfinite(x))
                    throw ParseError(glove_file.string(), line_no, "malformed value '" + field + "'");
                values.push_back(x);
            }
            if (values.size() != dim)
                throw ConfigError(glove_file.string() + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(dim) + " values, found " +
                                  std::to_string(values.size()));
            if (!vocab.contains(token)) continue;
            auto row = table.row(vocab.encode(token));
            std::copy(values.begin(), values.end(), row.begin());
        }
    }

    if (vocab.size() > kPadIndex && vocab.tokens()[kPadIndex] == kPadToken) {
        const double c = 1e-8 / std::sqrt(static_cast<double>(dim));
        for (auto& x : table.row(kPadIndex)) x = c;
    }
    return table;
}

PhaseTable init_phases(const Vocabulary& vocab, std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
    PhaseTable table(vocab.size(), dim);
    for (auto& x : table.values()) x = phase(rng);
    return table;
}

}  // namespace cnm
