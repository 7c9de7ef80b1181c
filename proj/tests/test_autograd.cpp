#include <catch_amalgamated.hpp>

#include "cnm/autograd.hpp"
#include "cnm/errors.hpp"
#include "gradcheck.hpp"

using namespace cnm;

TEST_CASE("analytic gradients agree with finite differences", "[autograd]") {
    std::size_t done = 0;
    for (std::size_t i = 0; done < 30; ++i) {
        const auto in = gradcheck::make_instance(7, i);
        const auto r = gradcheck::check(in);
        if (r.skipped) continue;
        ++done;
        for (int c = 0; c < gradcheck::kClasses; ++c) {
            INFO("instance " << i << " class " << gradcheck::class_name(c));
            CHECK(r.max_rel_error[c] <= 1e-4);
        }
    }
}

TEST_CASE("satisfied margin gives an all-zero gradient", "[autograd]") {
    auto in = gradcheck::make_instance(3, 0);
    // Same sentence as question and positive: s_pos = 1; empty-overlap
    // negative is not needed, margin 0 makes the hinge flat.
    in.pos = in.q;
    in.margin = 0.0;
    const auto tape = forward_triplet({in.q, in.pos, in.neg}, in.params, in.model, in.margin);
    REQUIRE(tape.score_positive == Catch::Approx(1.0));
    if (tape.loss == 0.0) {
        const auto g = backward(tape, in.params, in.model);
        CHECK(g.is_zero());
    }
    // Force the flat region explicitly.
    auto t2 = tape;
    t2.loss = 0.0;
    CHECK(backward(t2, in.params, in.model).is_zero());
}

TEST_CASE("words outside the triplet receive no gradient", "[autograd]") {
    auto in = gradcheck::make_instance(11, 1);
    in.q = {0, 1};
    in.pos = {1, 2};
    in.neg = {3};
    const auto tape = forward_triplet({in.q, in.pos, in.neg}, in.params, in.model, in.margin);
    const auto g = backward(tape, in.params, in.model);
    for (std::size_t t = 4; t < 8; ++t) {
        CHECK(g.amplitude_rows.count(t) == 0);
        CHECK(g.phase_rows.count(t) == 0);
    }
    CHECK(g.all_finite());
    CHECK(!g.is_zero());
}

TEST_CASE("cosine gradient matches the closed form", "[autograd]") {
    const std::vector<double> x{1.0, 2.0, 0.5}, y{0.3, -1.0, 2.0};
    const auto g = cosine_gradient(x, y);
    const double h = 1e-6;
    for (std::size_t i = 0; i < x.size(); ++i) {
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        CHECK(g[i] == Catch::Approx((cosine(xp, y) - cosine(xm, y)) / (2 * h)).epsilon(1e-6));
    }
    const std::vector<double> zero(3, 0.0);
    CHECK(cosine_gradient(zero, y) == zero);
    CHECK_THROWS_AS(cosine_gradient(x, std::vector<double>{1.0}), ShapeError);
}

TEST_CASE("gradient sets accumulate in order", "[autograd]") {
    GradientSet a(1, 2), b(1, 2);
    a.amplitude_row(3)[0] = 1.0;
    b.amplitude_row(3)[0] = 2.0;
    b.phase_row(5)[1] = -1.0;
    b.measurements[1] = {0.5, 0.25};
    a.accumulate(b, 0.5);
    CHECK(a.amplitude_rows.at(3)[0] == 2.0);
    CHECK(a.phase_rows.at(5)[1] == -0.5);
    CHECK(a.measurements[1] == Complex{0.25, 0.125});
    GradientSet wrong(2, 2);
    CHECK_THROWS_AS(a.accumulate(wrong), ShapeError);
}
