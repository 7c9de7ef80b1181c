#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cnm/complex_core.hpp"
#include "cnm/embedding.hpp"

namespace cnm {

// Hermitian, unit-trace, positive semi-definite matrix. Construction from a
// raw matrix checks shape, Hermiticity and trace; positivity is left to
// check_density(), which needs an eigendecomposition.
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix mat);

    const ComplexMatrix& matrix() const noexcept { return mat_; }
    std::size_t dim() const noexcept { return mat_.rows(); }

private:
    ComplexMatrix mat_;
};

struct DensityCheck {
    double hermitian_residual = 0.0;  // ||rho - rho^H||_F
    double trace_error = 0.0;         // |tr(rho) - 1|
    double min_eigenvalue = 0.0;
    double diagonal_min = 0.0;
    double max_diagonal_imag = 0.0;

    bool ok() const noexcept {
        return hermitian_residual <= 1e-9 && trace_error <= 1e-9 && min_eigenvalue >= -1e-8 &&
               diagonal_min >= -1e-9 && max_diagonal_imag <= 1e-9;
    }
};

DensityCheck check_density(const ComplexMatrix& rho);

// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

// Equal-weight mixture (1/m) sum_j |w_j><w_j|. Throws DomainError when empty.
DensityMatrix global_mixture(std::span<const WordState> words);

// sum_i p_i |w_i><w_i| with p = softmax(pi(w_i)). Throws DomainError when
// empty.
DensityMatrix local_mixture(std::span<const WordState> window);

// Window j covers tokens [begin, end) = [j, min(j + l, L)).
struct WindowSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const noexcept { return end - begin; }
    friend bool operator==(const WindowSpan&, const WindowSpan&) = default;
};

// One span per sentence position; trailing windows are truncated, so the
// count always equals sentence_length.
std::vector<WindowSpan> window_spans(std::size_t sentence_length, std::size_t window_length);

struct WindowSequence {
    std::vector<DensityMatrix> windows;
    std::size_t window_length = 0;
    std::size_t sentence_length = 0;
};

WindowSequence slide_windows(std::span<const WordState> sentence, std::size_t window_length);

}  // namespace cnm
