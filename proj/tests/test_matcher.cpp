#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cnm/errors.hpp"
#include "cnm/matcher.hpp"
#include "oracles.hpp"

using namespace cnm;
using Catch::Approx;

namespace {

ParameterSet random_params(std::size_t vocab, std::size_t n, std::size_t k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0), ph(-3.14159, 3.14159);
    std::normal_distribution<double> g;
    ParameterSet p{AmplitudeTable(vocab, n), PhaseTable(vocab, n), MeasurementSet(k, n)};
    for (auto& x : p.amplitudes.values()) x = u(rng);
    for (auto& x : p.phases.values()) x = ph(rng);
    for (auto& z : p.measurements.values()) z = {g(rng), g(rng)};
    p.measurements.normalize_rows();
    return p;
}

ModelConfig model(std::size_t n, std::size_t k) {
    ModelConfig m;
    m.embedding_dim = n;
    m.measurement_count = k;
    return m;
}

std::vector<std::size_t> random_tokens(std::size_t vocab, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> len(1, 8), tok(1, vocab - 1);
    std::vector<std::size_t> t(len(rng));
    for (auto& x : t) x = tok(rng);
    return t;
}

}  // namespace

TEST_CASE("representation shape and range", "[matcher]") {
    const auto p = random_params(20, 6, 10, 1);
    const auto m = model(6, 10);
    const std::vector<std::size_t> toks{3, 7, 2, 9, 11};
    const auto r = represent(toks, p, m);
    REQUIRE(r.values.size() == 40);
    for (double x : r.values) {
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
    }

    auto g = m;
    g.mixture = MixtureKind::global;
    CHECK(represent(toks, p, g).values.size() == 10);

    CHECK_THROWS_AS(represent(std::vector<std::size_t>{}, p, m), DegenerateInputError);
}

TEST_CASE("single-token sentences give identical blocks", "[matcher]") {
    const auto p = random_params(20, 5, 7, 2);
    const std::vector<std::size_t> tok{4};
    const auto r = represent(tok, p, model(5, 7));
    for (std::size_t b = 1; b < 4; ++b)
        for (std::size_t i = 0; i < 7; ++i) CHECK(r.values[b * 7 + i] == r.values[i]);
}

TEST_CASE("factored forward agrees with the density-matrix pipeline", "[matcher]") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        auto p = random_params(12, 4, 5, 100 + t);
        auto m = model(4, 5);
        if (t % 3 == 0) m.mixture = MixtureKind::global;
        if (t % 4 == 1) {
            // Real models keep real unit measurement rows, as the trainer enforces.
            m.complex_valued = false;
            for (auto& z : p.measurements.values()) z = {z.real(), 0.0};
            p.measurements.normalize_rows();
        }
        const auto toks = random_tokens(12, rng);
        const auto a = represent(toks, p, m).values;
        const auto b = represent_via_density(toks, p, m).values;
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(std::abs(a[i] - b[i]) <= 1e-12);

        // Independent long-double oracle.
        const auto o = oracle::represent(toks, oracle::Params::from(p),
                                         {m.window_sizes, m.mixture == MixtureKind::local, m.complex_valued});
        for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(std::abs(a[i] - static_cast<double>(o.values[i])) <= 1e-12);
    }
}

TEST_CASE("forward pass is deterministic given the dropout seed", "[matcher]") {
    const auto p = random_params(15, 4, 3, 4);
    const std::vector<std::size_t> toks{1, 5, 7, 9};
    std::mt19937_64 r1(77), r2(77);
    DropoutContext d1{0.3, &r1}, d2{0.3, &r2};
    const auto a = forward_sentence(toks, p, model(4, 3), &d1);
    const auto b = forward_sentence(toks, p, model(4, 3), &d2);
    CHECK(a.representation.values == b.representation.values);
    CHECK(a.output_mask == b.output_mask);
}

TEST_CASE("score", "[matcher]") {
    const SentenceRepresentation x{{0.2, 0.5, 0.1}}, y{{0.0, 0.0, 0.7}};
    CHECK(score(x, x) == Approx(1.0).epsilon(1e-15));
    CHECK(score(SentenceRepresentation{{1.0, 0.0}}, SentenceRepresentation{{0.0, 1.0}}) == 0.0);
    CHECK(score(SentenceRepresentation{{0.0, 0.0}}, SentenceRepresentation{{0.3, 0.1}}) == 0.0);
    CHECK_THROWS_AS(score(x, SentenceRepresentation{{1.0}}), ShapeError);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0), s(0.01, 100.0);
    for (int t = 0; t < 1000; ++t) {
        SentenceRepresentation a, b;
        for (int i = 0; i < 12; ++i) {
            a.values.push_back(u(rng));
            b.values.push_back(u(rng));
        }
        const double c = score(a, b);
        REQUIRE(c == score(b, a));
        const std::vector<oracle::LD> la(a.values.begin(), a.values.end()), lb(b.values.begin(), b.values.end());
        REQUIRE(std::abs(c - static_cast<double>(oracle::cosine(la, lb))) <= 1e-12);
        auto scaled = a;
        const double f = s(rng);
        for (auto& v : scaled.values) v *= f;
        REQUIRE(std::abs(score(scaled, b) - c) <= 1e-12);
    }
}

TEST_CASE("triplet loss", "[matcher]") {
    CHECK(triplet_loss(0.9, 0.2, 0.1) == 0.0);
    CHECK(triplet_loss(0.2, 0.9, 0.1) == Approx(0.8).epsilon(1e-15));
    CHECK(triplet_loss(0.4, 0.4, 0.1) == Approx(0.1).epsilon(1e-15));
    CHECK_THROWS_AS(triplet_loss(0.4, 0.4, -0.1), DomainError);

    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1.0, 1.0), m(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        const double sp = u(rng), sn = u(rng), mg = m(rng);
        const double l = triplet_loss(sp, sn, mg);
        REQUIRE(l >= 0.0);
        if (sp >= sn + mg) REQUIRE(l == 0.0);
    }
}

TEST_CASE("dropout", "[matcher]") {
    std::mt19937_64 rng(7);
    std::vector<double> v(100, 2.0);
    apply_dropout(std::span<double>(v), 0.9, rng, false);
    CHECK(v == std::vector<double>(100, 2.0));
    apply_dropout(std::span<double>(v), 0.0, rng, true);
    CHECK(v == std::vector<double>(100, 2.0));
    CHECK_THROWS_AS(dropout_mask(4, 1.0, rng, true), ConfigError);
    CHECK_THROWS_AS(dropout_mask(4, -0.1, rng, true), ConfigError);

    const auto mask = dropout_mask(100000, 0.9, rng, true);
    std::size_t kept = 0;
    for (double x : mask) {
        if (x != 0.0) {
            ++kept;
            REQUIRE(x == Approx(10.0).epsilon(1e-12));
        }
    }
    CHECK(std::abs(static_cast<double>(kept) / 1e5 - 0.1) <= 0.01);

    std::vector<Complex> z(1000, std::polar(1.0, 0.7));
    apply_dropout(std::span<Complex>(z), 0.5, rng, true);
    for (const auto& x : z)
        if (x != Complex{}) REQUIRE(std::abs(std::arg(x) - 0.7) < 1e-12);

    CHECK(DropoutConfig{0.9, true}.drop_probability() == Approx(0.1));
    CHECK(DropoutConfig{0.9, false}.drop_probability() == 0.9);
}

TEST_CASE("model config validation", "[matcher]") {
    auto m = model(4, 3);
    m.window_sizes = {};
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m = model(0, 3);
    CHECK_THROWS_AS(m.validate(), ConfigError);
    CHECK_NOTHROW(model(4, 3).validate());
}
