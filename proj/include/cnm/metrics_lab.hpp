#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cnm/mixture.hpp"

namespace cnm {

// Re tr(rho_a rho_b). Throws ShapeError on a dimension mismatch and
// NumericError if the imaginary residue exceeds 1e-9.
double trace_inner_product(const DensityMatrix& a, const DensityMatrix& b);

// tr(rho_a rho_a) - tr(rho_a rho_b) for rho_a = alpha|e1><e1| + (1-alpha)|e2><e2|
// and rho_b = |e1><e1|. Throws DomainError unless 0 <= alpha <= 1.
double appendix_counterexample(double alpha);
// The two matrices behind appendix_counterexample.
std::pair<DensityMatrix, DensityMatrix> appendix_counterexample_pair(double alpha);

// tr(rho_a (log rho_a - log rho_b)), eigenvalues floored at 1e-12 inside the
// logarithm (a regularized variant; the exact divergence is infinite when
// rho_b lacks support where rho_a has it).
double vn_divergence(const DensityMatrix& a, const DensityMatrix& b);
// (vn(a, b) + vn(b, a)) / 2.
double sym_vn(const DensityMatrix& a, const DensityMatrix& b);

// (tr sqrt(sqrt(a) b sqrt(a)))^2 in [0, 1], evaluated through the Bures
// distance for accuracy near a = b.
double fidelity(const DensityMatrix& a, const DensityMatrix& b);
double fidelity_distance(const DensityMatrix& a, const DensityMatrix& b);       // 1 - F
double sqrt_fidelity_distance(const DensityMatrix& a, const DensityMatrix& b);  // sqrt(1 - F)

// Mixture of m ~ U{1..dim} random pure states (normalized complex Gaussian
// vectors) with Dirichlet(1, ..., 1) weights.
DensityMatrix random_density(std::size_t dim, std::mt19937_64& rng);

// A metric under audit. Symmetry is tested on `value`; non-negativity,
// identity of indiscernibles and the triangle inequality on `distance`.
// For a proper distance both are the same function.
struct Metric {
    using Fn = std::function<double(const DensityMatrix&, const DensityMatrix&)>;
    std::string name;
    Fn value;
    Fn distance;
    std::string complexity = "O(n^3)";
    // Seeded cases checked before the random trials.
    std::vector<std::pair<DensityMatrix, DensityMatrix>> seeded_pairs;
};

// trace inner product (distance tr(aa) - tr(ab), seeded with the
// alpha = 3/4 counterexample), VN divergence, sym-VN, fidelity (1 - F),
// square root of fidelity.
std::vector<Metric> standard_metrics();

enum class Axiom { non_negativity, identity, symmetry, triangle };
inline constexpr std::size_t kAxiomCount = 4;
const char* axiom_name(Axiom a);

struct Counterexample {
    Axiom axiom = Axiom::non_negativity;
    std::optional<std::size_t> trial;  // empty for a seeded case
    std::uint64_t seed = 0;            // reproduces the trial through random_density
    std::vector<DensityMatrix> matrices;
    std::vector<double> values;        // the evaluations that break the axiom
    std::string detail;
};

struct AxiomResult {
    bool violated = false;
    std::size_t checks = 0;
    std::size_t failures = 0;
    std::optional<Counterexample> counterexample;
};

struct MetricAuditReport {
    std::string metric;
    std::string complexity;
    std::size_t trials = 0;
    AxiomResult axioms[kAxiomCount];

    const AxiomResult& operator[](Axiom a) const { return axioms[static_cast<std::size_t>(a)]; }
    AxiomResult& operator[](Axiom a) { return axioms[static_cast<std::size_t>(a)]; }
};

inline constexpr double kAuditTolerance = 1e-9;

// Random triples of densities, trial t drawn from seed_seq{seed, t} with
// dimension dims[t % dims.size()]. A flag is raised only when the stored
// counterexample, re-evaluated, still breaks the axiom by more than 1e-9.
// Throws DomainError for zero trials or empty dims.
MetricAuditReport audit_metric(const Metric& metric, std::size_t trials, std::span<const std::size_t> dims,
                               std::uint64_t seed);

// True when re-evaluating the counterexample breaks the axiom again.
bool reproduces(const Metric& metric, const Counterexample& c);

// Table with the comparison columns (differentiability is not audited).
void write_audit_table(std::ostream& out, std::span<const MetricAuditReport> reports);
void write_counterexamples(std::ostream& out, std::span<const MetricAuditReport> reports);

}  // namespace cnm
