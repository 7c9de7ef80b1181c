#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cnm/errors.hpp"
#include "cnm/measurement.hpp"

using namespace cnm;
using Catch::Approx;

namespace {

ComplexVector basis(std::size_t n, std::size_t i) {
    ComplexVector v(n);
    v[i] = 1.0;
    return v;
}

DensityMatrix random_density(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<WordState> words;
    for (int i = 0; i < 3; ++i) {
        ComplexVector v(n);
        for (auto& x : v) x = {g(rng), g(rng)};
        words.push_back(normalize_word(v));
    }
    return local_mixture(words);
}

// Columns of a random unitary: eigenvectors of a random Hermitian matrix.
ComplexMatrix random_unitary(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    ComplexMatrix a(n, n);
    for (auto& z : a.values()) z = {g(rng), g(rng)};
    return hermitian_eig(0.5 * (a + a.adjoint())).eigenvectors;
}

}  // namespace

TEST_CASE("measure", "[measurement]") {
    const DensityMatrix e1(outer_product(basis(3, 0)));
    CHECK(measure(e1, basis(3, 0)) == Approx(1.0));

    auto mixed = ComplexMatrix::identity(4);
    mixed *= 0.25;
    const DensityMatrix maximally(mixed);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    ComplexVector v(4);
    for (auto& x : v) x = {g(rng), g(rng)};
    v *= 1.0 / v.norm();
    CHECK(measure(maximally, v) == Approx(0.25));

    CHECK_THROWS_AS(measure(e1, ComplexVector{1.0, 1.0, 0.0}), DomainError);
    CHECK_THROWS_AS(measure(e1, ComplexVector{1.0, 0.0}), ShapeError);
}

TEST_CASE("complete orthonormal measurements sum to one", "[measurement][property]") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + t % 7;
        const auto rho = random_density(n, rng);
        const auto u = random_unitary(n, rng);
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) sum += measure(rho, u.column(j));
        REQUIRE(sum == Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("measure ignores a global phase", "[measurement][property]") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> ang(-3.0, 3.0);
    for (int t = 0; t < 200; ++t) {
        const auto rho = random_density(5, rng);
        ComplexVector v(5);
        for (auto& x : v) x = {g(rng), g(rng)};
        v *= 1.0 / v.norm();
        const double p = measure(rho, v);
        REQUIRE(p >= -1e-9);
        REQUIRE(p <= 1.0 + 1e-9);
        REQUIRE(std::abs(measure(rho, std::polar(1.0, ang(rng)) * v) - p) <= 1e-12);
    }
}

TEST_CASE("measure_all shape and element-wise agreement", "[measurement]") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    std::vector<WordState> words;
    for (int i = 0; i < 6; ++i) {
        ComplexVector v(4);
        for (auto& x : v) x = {g(rng), g(rng)};
        words.push_back(normalize_word(v));
    }
    const auto seq = slide_windows(words, 2);
    MeasurementSet m(3, 4);
    for (auto& z : m.values()) z = {g(rng), g(rng)};
    m.normalize_rows();
    const auto p = measure_all(seq, m);
    REQUIRE(p.k == 3);
    REQUIRE(p.windows == 6);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 6; ++j)
            CHECK(p(i, j) == Approx(std::clamp(measure(seq.windows[j], m.row(i)), 0.0, 1.0)).margin(1e-15));

    const auto single = measure_all(slide_windows(std::vector{words[0]}, 1), MeasurementSet(init_measurements(1, 4)));
    CHECK(single.values.size() == 1);
    CHECK(single(0, 0) == Approx(measure(DensityMatrix(outer_product(words[0].state)), basis(4, 0))));

    CHECK_THROWS_AS(measure_all(seq, MeasurementSet(init_measurements(2, 5))), ShapeError);
}

TEST_CASE("max pooling", "[measurement]") {
    ProbabilityMatrix p{2, 3, {0.1, 0.5, 0.2, 0.3, 0.3, 0.3}};
    const auto pooled = max_pool(p);
    CHECK(pooled.values == std::vector<double>{0.5, 0.3});
    CHECK(pooled.argmax == std::vector<std::size_t>{1, 0});

    ProbabilityMatrix one{3, 1, {0.2, 0.7, 0.1}};
    CHECK(max_pool(one).values == one.values);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        ProbabilityMatrix r{4, 5, {}};
        for (int i = 0; i < 20; ++i) r.values.push_back(u(rng));
        const auto m = max_pool(r);
        for (std::size_t i = 0; i < 4; ++i) {
            REQUIRE(m.values[i] == r(i, m.argmax[i]));
            for (std::size_t j = 0; j < 5; ++j) REQUIRE(r(i, j) <= m.values[i]);
        }
    }
}

TEST_CASE("one-hot initialisation wraps", "[measurement]") {
    const auto a = init_measurements(3, 5);
    for (std::size_t i = 0; i < 3; ++i) CHECK(a.row(i) == basis(5, i));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j) CHECK(inner(a.row(i), a.row(j)) == Complex{});

    const auto b = init_measurements(7, 5);
    const std::size_t expect[] = {0, 1, 2, 3, 4, 0, 1};
    for (std::size_t i = 0; i < 7; ++i) CHECK(b.row(i) == basis(5, expect[i]));
    CHECK_THROWS_AS(init_measurements(0, 5), ConfigError);
}

TEST_CASE("row normalisation", "[measurement]") {
    MeasurementSet m(2, 3);
    m(0, 0) = {3.0, 0.0};
    m(0, 2) = {0.0, 4.0};
    m.normalize_rows();
    CHECK(m.row(0).norm() == Approx(1.0).epsilon(1e-15));
    CHECK(m.row(1) == basis(3, 1));
}
