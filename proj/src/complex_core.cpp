#include "cnm/complex_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cnm/errors.hpp"

namespace cnm {

double ComplexVector::squared_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return s;
}

double ComplexVector::norm() const { return std::sqrt(squared_norm()); }

ComplexVector& ComplexVector::operator*=(Complex s) {
    for (auto& z : data_) z *= s;
    return *this;
}

ComplexVector& ComplexVector::operator*=(double s) {
    for (auto& z : data_) z *= s;
    return *this;
}

ComplexVector operator*(Complex s, ComplexVector v) {
    v *= s;
    return v;
}

ComplexVector operator+(ComplexVector a, const ComplexVector& b) {
    if (a.dim() != b.dim()) throw ShapeError("vector add: dimension mismatch");
    for (std::size_t i = 0; i < a.dim(); ++i) a[i] += b[i];
    return a;
}

Complex inner(const ComplexVector& a, const ComplexVector& b) {
    if (a.dim() != b.dim()) throw ShapeError("inner: dimension mismatch");
    Complex s{};
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, Complex fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) throw ShapeError("ComplexMatrix: ragged initializer");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
}

ComplexVector ComplexMatrix::column(std::size_t c) const {
    ComplexVector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw ShapeError("matrix add: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw ShapeError("matrix sub: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
    for (auto& z : data_) z *= s;
    return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

ComplexMatrix outer_product(const ComplexVector& v) {
    const std::size_t n = v.dim();
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = std::norm(v[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            const Complex z = v[i] * std::conj(v[j]);
            m(i, j) = z;
            m(j, i) = std::conj(z);
        }
    }
    return m;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) {
        std::ostringstream msg;
        msg << "matmul: shape mismatch " << a.rows() << "x" << a.cols() << " * " << b.rows() << "x"
            << b.cols();
        throw ShapeError(msg.str());
    }
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

ComplexVector matvec(const ComplexMatrix& a, const ComplexVector& v) {
    if (a.cols() != v.dim()) throw ShapeError("matvec: shape mismatch");
    ComplexVector out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Complex s{};
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

Complex trace(const ComplexMatrix& a) {
    if (!a.is_square()) throw ShapeError("trace: matrix is not square");
    Complex s{};
    for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, i);
    return s;
}

double hermitian_residual(const ComplexMatrix& a) {
    if (!a.is_square()) throw ShapeError("hermitian_residual: matrix is not square");
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s += std::norm(a(i, j) - std::conj(a(j, i)));
    return std::sqrt(s);
}

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kConvergence = 1e-12;
constexpr double kHermitianTolerance = 1e-8;

double off_diagonal_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

// Zeroes a(p,q) with the unitary G = diag(1, e^{-i theta}) * R(c, s), where
// a(p,q) = |a(p,q)| e^{i theta}. The phase factor reduces the 2x2 block to a
// real symmetric one and R is the classical Jacobi rotation for it.
void rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
    const Complex apq = a(p, q);
    const double r = std::abs(apq);
    if (r == 0.0) return;
    const Complex phase = apq / r;  // e^{i theta}
    const double app = a(p, p).real();
    const double aqq = a(q, q).real();

    const double tau = (aqq - app) / (2.0 * r);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(tau * tau + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;

    const Complex g00 = c;
    const Complex g01 = s;
    const Complex g10 = -s * std::conj(phase);
    const Complex g11 = c * std::conj(phase);

    const std::size_t n = a.rows();
    for (std::size_t k = 0; k < n; ++k) {
        const Complex akp = a(k, p);
        const Complex akq = a(k, q);
        a(k, p) = akp * g00 + akq * g10;
        a(k, q) = akp * g01 + akq * g11;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const Complex apk = a(p, k);
        const Complex aqk = a(q, k);
        a(p, k) = std::conj(g00) * apk + std::conj(g10) * aqk;
        a(q, k) = std::conj(g01) * apk + std::conj(g11) * aqk;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = a(p, p).real();
    a(q, q) = a(q, q).real();

    for (std::size_t k = 0; k < n; ++k) {
        const Complex vkp = v(k, p);
        const Complex vkq = v(k, q);
        v(k, p) = vkp * g00 + vkq * g10;
        v(k, q) = vkp * g01 + vkq * g11;
    }
}

}  // namespace

EigenDecomposition hermitian_eig(const ComplexMatrix& input) {
    if (!input.is_square()) throw ShapeError("hermitian_eig: matrix is not square");
    const double scale = input.frobenius_norm();
    if (!std::isfinite(scale)) throw NumericError("hermitian_eig: non-finite input");
    const double asym = hermitian_residual(input);
    if (asym > kHermitianTolerance * std::max(1.0, scale)) {
        std::ostringstream msg;
        msg << "hermitian_eig: input is not Hermitian (||A - A^H||_F = " << asym << ")";
        throw DomainError(msg.str());
    }

    const std::size_t n = input.rows();
    // Work on the Hermitian part so tiny asymmetries do not bias the result.
    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (input(i, j) + std::conj(input(j, i)));
    for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();

    ComplexMatrix v = ComplexMatrix::identity(n);
    const double threshold = kConvergence * scale;
    int sweeps = 0;
    double off = off_diagonal_norm(a);
    while (off > threshold) {
        if (sweeps == kMaxSweeps) {
            std::ostringstream msg;
            msg << "hermitian_eig: no convergence after " << kMaxSweeps
                << " sweeps (off-diagonal residual " << off << ")";
            throw NumericError(msg.str());
        }
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
        ++sweeps;
        off = off_diagonal_norm(a);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x).real() > a(y, y).real(); });

    EigenDecomposition out;
    out.sweeps = sweeps;
    out.eigenvalues.reserve(n);
    out.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues.push_back(a(order[j], order[j]).real());
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, order[j]);
    }
    return out;
}

ComplexMatrix matrix_function(const ComplexMatrix& a, const std::function<double(double)>& f,
                              double eigen_floor) {
    const auto eig = hermitian_eig(a);
    const std::size_t n = a.rows();
    std::vector<double> fl(n);
    for (std::size_t j = 0; j < n; ++j) {
        fl[j] = f(std::max(eig.eigenvalues[j], eigen_floor));
        if (!std::isfinite(fl[j])) throw NumericError("matrix_function: f produced a non-finite value");
    }
    const auto& v = eig.eigenvectors;
    ComplexMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = i; k < n; ++k) {
            Complex s{};
            for (std::size_t j = 0; j < n; ++j) s += v(i, j) * fl[j] * std::conj(v(k, j));
            out(i, k) = s;
            out(k, i) = std::conj(s);
        }
    for (std::size_t i = 0; i < n; ++i) out(i, i) = out(i, i).real();
    return out;
}

ComplexMatrix matrix_log(const ComplexMatrix& a, double eigen_floor) {
    return matrix_function(a, [](double x) { return std::log(x); }, eigen_floor);
}

ComplexMatrix matrix_sqrt(const ComplexMatrix& a, double eigen_floor) {
    return matrix_function(a, [](double x) { return std::sqrt(x); }, eigen_floor);
}

Polar complex_add_polar(Polar z1, Polar z2) {
    const double y = z1.r * std::sin(z1.theta) + z2.r * std::sin(z2.theta);
    const double x = z1.r * std::cos(z1.theta) + z2.r * std::cos(z2.theta);
    // Equal phases: cos(0) = 1 and the law of cosines collapses to r1 + r2;
    // take that branch literally so the real case is exact.
    if (z1.theta == z2.theta) {
        const double r = z1.r + z2.r;
        return r == 0.0 ? Polar{} : Polar{r, std::atan2(y, x)};
    }
    const double r2 = z1.r * z1.r + z2.r * z2.r + 2.0 * z1.r * z2.r * std::cos(z2.theta - z1.theta);
    const double r = std::sqrt(std::max(0.0, r2));
    if (r == 0.0) return {0.0, 0.0};
    return {r, std::atan2(y, x)};
}

}  // namespace cnm
