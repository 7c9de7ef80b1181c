#pragma once

// Analytic gradients against the long double reference on random small
// instances.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cnm/autograd.hpp"
#include "oracles.hpp"

namespace gradcheck {

enum Class { amplitude, phase, meas_re, meas_im, kClasses };
inline const char* class_name(int c) {
    static const char* names[] = {"amplitude", "phase", "measurement.re", "measurement.im"};
    return names[c];
}

struct Instance {
    cnm::ParameterSet params;
    cnm::ModelConfig model;
    std::vector<std::size_t> q, pos, neg;
    double margin = 2.5;  // cosines lie in [0, 1], so the hinge stays open
};

// n = 4, k = 3, sentences of 1..5 tokens over an 8-word vocabulary. Every
// third instance uses the global mixture and every fourth the real-valued
// ablation.
inline Instance make_instance(std::uint64_t seed, std::size_t index) {
    std::mt19937_64 rng(seed * 1000003ULL + index);
    std::uniform_real_distribution<double> amp(-1.0, 1.0), ph(-M_PI, M_PI);
    std::normal_distribution<double> g;
    Instance in;
    const std::size_t vocab = 8, n = 4, k = 3;
    in.model.embedding_dim = n;
    in.model.measurement_count = k;
    in.model.window_sizes = {1, 2, 3};
    in.model.mixture = index % 3 == 2 ? cnm::MixtureKind::global : cnm::MixtureKind::local;
    in.model.complex_valued = index % 4 != 3;
    in.params.amplitudes = cnm::AmplitudeTable(vocab, n);
    in.params.phases = cnm::PhaseTable(vocab, n);
    for (auto& x : in.params.amplitudes.values()) x = amp(rng);
    for (auto& x : in.params.phases.values()) x = ph(rng);
    in.params.measurements = cnm::MeasurementSet(k, n);
    for (auto& z : in.params.measurements.values()) z = {g(rng), g(rng)};
    in.params.measurements.normalize_rows();
    std::uniform_int_distribution<std::size_t> len(1, 5), tok(0, vocab - 1);
    for (auto* s : {&in.q, &in.pos, &in.neg}) {
        const std::size_t l = len(rng);
        for (std::size_t i = 0; i < l; ++i) s->push_back(tok(rng));
    }
    return in;
}

struct Result {
    std::array<double, kClasses> max_rel_error{};
    std::array<std::size_t, kClasses> checked{};
    bool skipped = false;  // argmax too close to a tie for finite differences
};

inline double rel_error(double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max(1e-8, std::abs(numeric));
}

inline Result check(const Instance& in, double h = 1e-5) {
    Result r;
    oracle::Config oc;
    oc.windows = in.model.window_sizes;
    oc.local = in.model.mixture == cnm::MixtureKind::local;
    oc.complex_valued = in.model.complex_valued;
    oracle::Params P = oracle::Params::from(in.params);
    const auto base = oracle::loss(in.q, in.pos, in.neg, P, oc, in.margin);
    if (base.min_gap < 1e-3L) {
        r.skipped = true;
        return r;
    }

    const auto tape = cnm::forward_triplet({in.q, in.pos, in.neg}, in.params, in.model, in.margin);
    const auto grads = cnm::backward(tape, in.params, in.model);
    auto f = [&] { return oracle::loss(in.q, in.pos, in.neg, P, oc, in.margin).loss; };

    const std::size_t n = P.n;
    std::vector<bool> used(P.vocab, false);
    for (const auto* s : {&in.q, &in.pos, &in.neg})
        for (auto t : *s) used[t] = true;

    auto record = [&](int cls, double analytic, long double numeric) {
        r.max_rel_error[cls] = std::max(r.max_rel_error[cls], rel_error(analytic, static_cast<double>(numeric)));
        ++r.checked[cls];
    };
    for (std::size_t t = 0; t < P.vocab; ++t) {
        const auto ga = grads.amplitude_rows.find(t);
        const auto gp = grads.phase_rows.find(t);
        for (std::size_t j = 0; j < n; ++j) {
            const long double na = oracle::central_difference(f, P.amp[t * n + j], h);
            record(amplitude, ga == grads.amplitude_rows.end() ? 0.0 : ga->second[j], na);
            if (in.model.complex_valued) {
                const long double np = oracle::central_difference(f, P.phase[t * n + j], h);
                record(phase, gp == grads.phase_rows.end() ? 0.0 : gp->second[j], np);
            } else if (gp != grads.phase_rows.end()) {
                record(phase, gp->second[j], 0.0L);
            }
        }
    }
    for (std::size_t i = 0; i < P.k * n; ++i) {
        // Perturb real and imaginary parts through a proxy scalar.
        const auto z0 = P.meas[i];
        long double re = z0.real(), im = z0.imag();
        auto fre = [&] {
            P.meas[i] = {re, im};
            return f();
        };
        const long double nre = oracle::central_difference(fre, re, h);
        const long double nim = oracle::central_difference(fre, im, h);
        P.meas[i] = z0;
        record(meas_re, grads.measurements[i].real(), nre);
        record(meas_im, grads.measurements[i].imag(), nim);
    }
    return r;
}

}  // namespace gradcheck
