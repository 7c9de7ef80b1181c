#include "cnm/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cnm/errors.hpp"

namespace cnm {

DensityMatrix::DensityMatrix(ComplexMatrix mat) : mat_(std::move(mat)) {
    if (!mat_.is_square() || mat_.rows() == 0) throw ShapeError("density matrix must be square and non-empty");
    if (hermitian_residual(mat_) > 1e-9) throw DomainError("density matrix is not Hermitian");
    if (std::abs(trace(mat_) - Complex{1.0, 0.0}) > 1e-9) throw DomainError("density matrix trace is not 1");
}

DensityCheck check_density(const ComplexMatrix& rho) {
    DensityCheck out;
    out.hermitian_residual = hermitian_residual(rho);
    out.trace_error = std::abs(trace(rho) - Complex{1.0, 0.0});
    out.diagonal_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rho.rows(); ++i) {
        out.diagonal_min = std::min(out.diagonal_min, rho(i, i).real());
        out.max_diagonal_imag = std::max(out.max_diagonal_imag, std::abs(rho(i, i).imag()));
    }
    const auto eig = hermitian_eig(rho);
    out.min_eigenvalue = eig.eigenvalues.back();
    return out;
}

std::vector<double> softmax(std::span<const double> logits) {
    if (logits.empty()) return {};
    const double top = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - top);
        total += out[i];
    }
    for (auto& p : out) p /= total;
    return out;
}

namespace {

DensityMatrix weighted_mixture(std::span<const WordState> words, std::span<const double> weights) {
    const std::size_t n = words.front().state.dim();
    ComplexMatrix rho(n, n);
    for (std::size_t w = 0; w < words.size(); ++w) {
        const auto& v = words[w].state;
        if (v.dim() != n) throw ShapeError("mixture: word states differ in dimension");
        const double p = weights[w];
        for (std::size_t i = 0; i < n; ++i) {
            rho(i, i) += p * std::norm(v[i]);
            for (std::size_t j = i + 1; j < n; ++j) rho(i, j) += p * v[i] * std::conj(v[j]);
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) rho(j, i) = std::conj(rho(i, j));
    return DensityMatrix(std::move(rho));
}

}  // namespace

DensityMatrix global_mixture(std::span<const WordState> words) {
    if (words.empty()) throw DomainError("global_mixture: no words");
    const std::vector<double> weights(words.size(), 1.0 / static_cast<double>(words.size()));
    return weighted_mixture(words, weights);
}

DensityMatrix local_mixture(std::span<const WordState> window) {
    if (window.empty()) throw DomainError("local_mixture: empty window");
    std::vector<double> logits;
    logits.reserve(window.size());
    for (const auto& w : window) logits.push_back(w.weight);
    return weighted_mixture(window, softmax(logits));
}

std::vector<WindowSpan> window_spans(std::size_t sentence_length, std::size_t window_length) {
    if (window_length == 0) throw DomainError("window length must be positive");
    std::vector<WindowSpan> spans;
    spans.reserve(sentence_length);
    for (std::size_t j = 0; j < sentence_length; ++j)
        spans.push_back({j, std::min(j + window_length, sentence_length)});
    return spans;
}

WindowSequence slide_windows(std::span<const WordState> sentence, std::size_t window_length) {
    WindowSequence out;
    out.window_length = window_length;
    out.sentence_length = sentence.size();
    for (const auto& span : window_spans(sentence.size(), window_length))
        out.windows.push_back(local_mixture(sentence.subspan(span.begin, span.size())));
    return out;
}

}  // namespace cnm
