#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "cnm/embedding.hpp"
#include "cnm/errors.hpp"

using namespace cnm;
using Catch::Approx;

namespace {

std::string fixture(const char* name) { return std::string(CNM_FIXTURES) + "/" + name; }

Vocabulary small_vocab() {
    auto v = Vocabulary::with_reserved_tokens();
    for (const char* t : {"the", "sky", "blue", "absent"}) v.add(t);
    return v;
}

}  // namespace

TEST_CASE("tokenize lowercases and strips surrounding punctuation", "[embedding]") {
    CHECK(tokenize("Who invented the Telephone?") == std::vector<std::string>{"who", "invented", "the", "telephone"});
    CHECK(tokenize("  (hello),  world!! ...  ") == std::vector<std::string>{"hello", "world"});
    CHECK(tokenize("14.8 ml U.S.A.") == std::vector<std::string>{"14.8", "ml", "u.s.a"});
    CHECK(tokenize("?!").empty());
}

TEST_CASE("vocabulary reserves padding and OOV", "[embedding]") {
    auto v = small_vocab();
    CHECK(v.token(kPadIndex) == kPadToken);
    CHECK(v.token(kOovIndex) == kOovToken);
    CHECK(v.encode("sky") == 3);
    CHECK(v.encode("never-seen") == kOovIndex);
    CHECK(v.add("sky") == 3);
    CHECK_THROWS_AS(v.token(99), LookupError);
    Vocabulary bare;
    bare.add("x");
    CHECK_THROWS_AS(bare.encode("y"), LookupError);
}

TEST_CASE("assemble_word_vector", "[embedding]") {
    AmplitudeTable r(2, 2);
    PhaseTable p(2, 2);
    r(0, 0) = 1.0;
    CHECK(assemble_word_vector(0, r, p) == ComplexVector{1.0, 0.0});
    r(1, 0) = 1.0;
    r(1, 1) = 1.0;
    p(1, 1) = std::numbers::pi / 2;
    const auto v = assemble_word_vector(1, r, p);
    CHECK(v[0] == Complex{1.0, 0.0});
    CHECK(std::abs(v[1] - Complex{0.0, 1.0}) < 1e-15);
    CHECK_THROWS_AS(assemble_word_vector(2, r, p), LookupError);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-2.0, 2.0), ph(-4.0, 4.0);
    AmplitudeTable rr(1, 16);
    PhaseTable pp(1, 16);
    for (auto& x : rr.values()) x = u(rng);
    for (auto& x : pp.values()) x = ph(rng);
    const auto w = assemble_word_vector(0, rr, pp);
    for (std::size_t j = 0; j < 16; ++j) CHECK(std::abs(w[j]) == Approx(std::abs(rr(0, j))).epsilon(1e-14));
}

TEST_CASE("normalize_word", "[embedding]") {
    const auto s = normalize_word(ComplexVector{Complex{3, 0}, Complex{0, 4}});
    CHECK(s.weight == 5.0);
    CHECK(std::abs(s.state[0] - Complex{0.6, 0}) < 1e-15);
    CHECK(std::abs(s.state[1] - Complex{0, 0.8}) < 1e-15);

    const ComplexVector unit{Complex{0.6, 0}, Complex{0, 0.8}};
    const auto u = normalize_word(unit);
    CHECK(u.weight == Approx(1.0).epsilon(1e-15));
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(u.state[j] - unit[j]) < 1e-12);

    const auto z = normalize_word(ComplexVector(4));
    CHECK(z.weight == kDegenerateWeight);
    for (const auto& x : z.state) CHECK(x == Complex{0.5, 0.0});
    CHECK_THROWS_AS(normalize_word(ComplexVector{}), DegenerateInputError);
}

TEST_CASE("word states are unit vectors that reconstruct the raw vector", "[embedding][property]") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    for (int t = 0; t < 1000; ++t) {
        ComplexVector v(1 + t % 12);
        for (auto& x : v) x = {g(rng), g(rng)};
        const auto s = normalize_word(v);
        REQUIRE(std::abs(s.state.squared_norm() - 1.0) <= 1e-9);
        for (std::size_t j = 0; j < v.dim(); ++j) REQUIRE(std::abs(s.state[j] * s.weight - v[j]) <= 1e-12);
        // Scaling the raw vector scales the weight only.
        auto scaled = v;
        scaled *= 3.5;
        const auto s2 = normalize_word(scaled);
        REQUIRE(s2.weight == Approx(3.5 * s.weight).epsilon(1e-12));
        for (std::size_t j = 0; j < v.dim(); ++j) REQUIRE(std::abs(s2.state[j] - s.state[j]) <= 1e-12);
    }
}

TEST_CASE("GloVe initialisation", "[embedding]") {
    const auto vocab = small_vocab();
    std::mt19937_64 rng(3);
    const auto t = init_amplitudes_from_glove(vocab, fixture("glove_small.txt"), 3, rng);
    REQUIRE(t.rows() == vocab.size());
    const auto sky = t.row(vocab.encode("sky"));
    CHECK(std::vector<double>(sky.begin(), sky.end()) == std::vector<double>{-1.5, 0.25, 2.0});
    const auto blue = t.row(vocab.encode("blue"));
    CHECK(std::vector<double>(blue.begin(), blue.end()) == std::vector<double>{0.5, -0.5, 0.125});
    for (double x : t.row(vocab.encode("absent"))) CHECK(std::abs(x) < 0.25);
    double pad = 0.0;
    for (double x : t.row(kPadIndex)) pad += x * x;
    CHECK(std::sqrt(pad) == Approx(1e-8));

    CHECK_THROWS_AS(init_amplitudes_from_glove(vocab, fixture("glove_bad_value.txt"), 3, rng), ParseError);
    try {
        init_amplitudes_from_glove(vocab, fixture("glove_bad_value.txt"), 3, rng);
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(init_amplitudes_from_glove(vocab, fixture("glove_bad_dim.txt"), 3, rng), ConfigError);
    CHECK_THROWS_AS(init_amplitudes_from_glove(vocab, fixture("glove_small.txt"), 4, rng), ConfigError);

    const auto empty = init_amplitudes_from_glove(Vocabulary{}, {}, 3, rng);
    CHECK(empty.rows() == 0);
}

TEST_CASE("OOV rows stay inside (-0.25, 0.25)", "[embedding]") {
    Vocabulary v;
    for (int i = 0; i < 1000; ++i) v.add("w" + std::to_string(i));
    std::mt19937_64 rng(4);
    const auto t = init_amplitudes_from_glove(v, {}, 1, rng);
    for (double x : t.values()) REQUIRE((x > -0.25 && x < 0.25));
}

TEST_CASE("phase initialisation", "[embedding]") {
    Vocabulary v;
    for (int i = 0; i < 2000; ++i) v.add("w" + std::to_string(i));
    const auto a = init_phases(v, 50, 9);
    const auto b = init_phases(v, 50, 9);
    CHECK(a == b);
    CHECK(!(a == init_phases(v, 50, 10)));
    double mean = 0.0;
    for (double x : a.values()) {
        REQUIRE(x >= -std::numbers::pi);
        REQUIRE(x <= std::numbers::pi);
        mean += x;
    }
    mean /= static_cast<double>(a.values().size());
    CHECK(std::abs(mean) <= 0.02);
}
