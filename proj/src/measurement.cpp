#include "cnm/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cnm/errors.hpp"

namespace cnm {

ComplexVector MeasurementSet::row(std::size_t i) const {
    if (i >= k_) throw LookupError("measurement index out of range");
    return ComplexVector(std::vector<Complex>(data_.begin() + static_cast<std::ptrdiff_t>(i * n_),
                                              data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * n_)));
}

void MeasurementSet::set_row(std::size_t i, const ComplexVector& v) {
    if (i >= k_) throw LookupError("measurement index out of range");
    if (v.dim() != n_) throw ShapeError("measurement row has wrong dimension");
    std::copy(v.begin(), v.end(), data_.begin() + static_cast<std::ptrdiff_t>(i * n_));
}

void MeasurementSet::normalize_rows() {
    for (std::size_t i = 0; i < k_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n_; ++j) s += std::norm((*this)(i, j));
        const double norm = std::sqrt(s);
        if (norm == 0.0) {
            (*this)(i, i % n_) = 1.0;
            continue;
        }
        for (std::size_t j = 0; j < n_; ++j) (*this)(i, j) /= norm;
    }
}

double measure(const DensityMatrix& rho, const ComplexVector& v) {
    const auto& m = rho.matrix();
    if (v.dim() != m.rows()) throw ShapeError("measure: dimension mismatch");
    const double norm = v.norm();
    if (std::abs(norm - 1.0) > 1e-6) {
        std::ostringstream msg;
        msg << "measure: measurement vector is not unit length (norm " << norm << ")";
        throw DomainError(msg.str());
    }
    Complex s{};
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Complex row{};
        for (std::size_t j = 0; j < m.cols(); ++j) row += m(i, j) * v[j];
        s += std::conj(v[i]) * row;
    }
    if (std::abs(s.imag()) > 1e-9) throw NumericError("measure: imaginary residue above 1e-9");
    return s.real();
}

ProbabilityMatrix measure_all(const WindowSequence& windows, const MeasurementSet& measurements) {
    ProbabilityMatrix p;
    p.k = measurements.count();
    p.windows = windows.windows.size();
    p.values.assign(p.k * p.windows, 0.0);
    for (std::size_t i = 0; i < p.k; ++i) {
        const auto v = measurements.row(i);
        for (std::size_t j = 0; j < p.windows; ++j) {
            if (windows.windows[j].dim() != measurements.dim())
                throw ShapeError("measure_all: window and measurement dimensions differ");
            p(i, j) = std::clamp(measure(windows.windows[j], v), 0.0, 1.0);
        }
    }
    return p;
}

PooledVector max_pool(const ProbabilityMatrix& p) {
    if (p.windows == 0) throw DomainError("max_pool: no windows");
    PooledVector out;
    out.values.resize(p.k);
    out.argmax.resize(p.k);
    for (std::size_t i = 0; i < p.k; ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < p.windows; ++j)
            if (p(i, j) > p(i, best)) best = j;
        out.values[i] = p(i, best);
        out.argmax[i] = best;
    }
    return out;
}

MeasurementSet init_measurements(std::size_t k, std::size_t n) {
    if (k == 0 || n == 0) throw ConfigError("measurement count and dimension must be positive");
    MeasurementSet m(k, n);
    for (std::size_t i = 0; i < k; ++i) m(i, i % n) = 1.0;
    return m;
}

}  // namespace cnm
