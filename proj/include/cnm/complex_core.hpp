#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace cnm {

using Complex = std::complex<double>;

class ComplexVector {
public:
    ComplexVector() = default;
    explicit ComplexVector(std::size_t dim, Complex fill = Complex{}) : data_(dim, fill) {}
    ComplexVector(std::initializer_list<Complex> values) : data_(values) {}
    explicit ComplexVector(std::vector<Complex> values) : data_(std::move(values)) {}

    std::size_t dim() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    Complex& operator[](std::size_t i) { return data_[i]; }
    const Complex& operator[](std::size_t i) const { return data_[i]; }

    std::span<Complex> values() noexcept { return data_; }
    std::span<const Complex> values() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    // Euclidean norm over complex moduli.
    double norm() const;
    double squared_norm() const;

    ComplexVector& operator*=(Complex s);
    ComplexVector& operator*=(double s);

    friend bool operator==(const ComplexVector&, const ComplexVector&) = default;

private:
    std::vector<Complex> data_;
};

ComplexVector operator*(Complex s, ComplexVector v);
ComplexVector operator+(ComplexVector a, const ComplexVector& b);

// Hermitian inner product <a|b> = sum conj(a_i) b_i.
Complex inner(const ComplexVector& a, const ComplexVector& b);

// Dense row-major complex matrix.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols, Complex fill = Complex{});
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<Complex> values() noexcept { return data_; }
    std::span<const Complex> values() const noexcept { return data_; }

    ComplexVector column(std::size_t c) const;

    ComplexMatrix adjoint() const;
    double frobenius_norm() const;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(Complex s);

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, ComplexMatrix a);

// v v^dagger.
ComplexMatrix outer_product(const ComplexVector& v);

// Throws ShapeError when a.cols() != b.rows().
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector matvec(const ComplexMatrix& a, const ComplexVector& v);

// Throws ShapeError for non-square input.
Complex trace(const ComplexMatrix& a);

// ||A - A^dagger||_F; zero for exactly Hermitian input.
double hermitian_residual(const ComplexMatrix& a);

struct EigenDecomposition {
    std::vector<double> eigenvalues;  // descending
    ComplexMatrix eigenvectors;       // column j pairs with eigenvalues[j]
    int sweeps = 0;
};

// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
//
// Input must satisfy ||A - A^dagger||_F <= 1e-8 * max(1, ||A||_F), otherwise a
// DomainError is thrown. Iterates until the off-diagonal Frobenius mass falls
// under 1e-12 * ||A||_F; after 100 sweeps without convergence a NumericError
// reporting the residual is raised.
EigenDecomposition hermitian_eig(const ComplexMatrix& a);

// V diag(f(max(lambda, eigen_floor))) V^dagger.
ComplexMatrix matrix_function(const ComplexMatrix& a,
                              const std::function<double(double)>& f,
                              double eigen_floor);

ComplexMatrix matrix_log(const ComplexMatrix& a, double eigen_floor = 1e-12);
ComplexMatrix matrix_sqrt(const ComplexMatrix& a, double eigen_floor = 0.0);

// Polar pair (modulus, angle in radians).
struct Polar {
    double r = 0.0;
    double theta = 0.0;
};

// Sum of two polar numbers in polar form. A zero modulus result reports
// angle 0.
Polar complex_add_polar(Polar z1, Polar z2);

}  // namespace cnm
