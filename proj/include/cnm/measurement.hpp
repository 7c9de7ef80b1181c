#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cnm/complex_core.hpp"
#include "cnm/mixture.hpp"

namespace cnm {

// k measurement states |v_i>, stored as a k x n complex matrix (one state per
// row). Each row is kept at unit norm by the trainer.
class MeasurementSet {
public:
    MeasurementSet() = default;
    MeasurementSet(std::size_t k, std::size_t n) : k_(k), n_(n), data_(k * n) {}

    std::size_t count() const noexcept { return k_; }
    std::size_t dim() const noexcept { return n_; }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    ComplexVector row(std::size_t i) const;
    void set_row(std::size_t i, const ComplexVector& v);

    // Rescales every row to unit norm. Zero rows become e_(i mod n).
    void normalize_rows();

    std::vector<Complex>& values() noexcept { return data_; }
    const std::vector<Complex>& values() const noexcept { return data_; }

    friend bool operator==(const MeasurementSet&, const MeasurementSet&) = default;

private:
    std::size_t k_ = 0;
    std::size_t n_ = 0;
    std::vector<Complex> data_;
};

// k x L matrix of measured probabilities, row-major.
struct ProbabilityMatrix {
    std::size_t k = 0;
    std::size_t windows = 0;
    std::vector<double> values;

    double operator()(std::size_t i, std::size_t j) const { return values[i * windows + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values[i * windows + j]; }
};

// <v|rho|v>. Throws DomainError if | ||v|| - 1 | > 1e-6 and NumericError if
// the imaginary residue exceeds 1e-9. The raw real part is returned unclamped.
double measure(const DensityMatrix& rho, const ComplexVector& v);

// Probabilities of every measurement on every window, clamped to [0, 1].
ProbabilityMatrix measure_all(const WindowSequence& windows, const MeasurementSet& measurements);

struct PooledVector {
    std::vector<double> values;
    std::vector<std::size_t> argmax;  // lowest window index on ties
};

PooledVector max_pool(const ProbabilityMatrix& p);

// Row i = one-hot at (i mod n), zero imaginary part.
MeasurementSet init_measurements(std::size_t k, std::size_t n);

}  // namespace cnm
