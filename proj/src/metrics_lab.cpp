#include "cnm/metrics_lab.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "cnm/errors.hpp"
#include "cnm/parallel.hpp"

namespace cnm {

namespace {

void require_same_dim(const DensityMatrix& a, const DensityMatrix& b, const char* what) {
    if (a.dim() != b.dim())
        throw ShapeError(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()) + ")");
}

// Re tr(A B) without forming the product.
Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    Complex t{};
    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) t += a(i, j) * b(j, i);
    return t;
}

ComplexMatrix hermitize(const ComplexMatrix& m) {
    ComplexMatrix out = m;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    return out;
}

// Eigenvalues at or below this share of the spectrum are rounding noise;
// taking their square root would turn 1e-17 into 3e-9.
double noise_floor(const std::vector<double>& eigenvalues) {
    return 1e-14 * std::max(1.0, eigenvalues.empty() ? 0.0 : eigenvalues.front());
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
    const auto eig = hermitian_eig(m);
    const double floor = noise_floor(eig.eigenvalues);
    return matrix_function(m, [floor](double x) { return x <= floor ? 0.0 : std::sqrt(x); }, 0.0);
}

// Bures distance min_U ||sqrt(a) - sqrt(b) U||_F, evaluated as the norm of a
// difference so it stays accurate when a and b nearly coincide. U = V W^H
// from the SVD sqrt(a) sqrt(b) = W S V^H; V and S come from the eigenpairs of
// M^H M, the left vectors are M v / s, re-orthonormalized and completed.
double bures_distance(const ComplexMatrix& ra, const ComplexMatrix& rb) {
    const std::size_t n = ra.rows();
    const ComplexMatrix m = matmul(ra, rb);
    const auto eig = hermitian_eig(hermitize(matmul(m.adjoint(), m)));
    const ComplexMatrix& v = eig.eigenvectors;

    std::vector<ComplexVector> left;
    auto add_orthonormal = [&](ComplexVector w) {
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : left) {
                const Complex c = inner(q, w);
                for (std::size_t i = 0; i < n; ++i) w[i] -= c * q[i];
            }
        const double norm = w.norm();
        if (norm < 1e-12) return false;
        w *= 1.0 / norm;
        left.push_back(std::move(w));
        return true;
    };
    std::vector<std::size_t> paired;  // column of v matched to each left vector
    for (std::size_t j = 0; j < n; ++j) {
        const ComplexVector mv = matvec(m, v.column(j));
        if (mv.norm() > 0.0 && add_orthonormal(mv)) paired.push_back(j);
    }
    for (std::size_t j = 0; j < n; ++j)
        if (std::find(paired.begin(), paired.end(), j) == paired.end()) {
            for (std::size_t e = 0; e < n; ++e) {
                ComplexVector basis(n);
                basis[e] = 1.0;
                if (add_orthonormal(std::move(basis))) break;
            }
            paired.push_back(j);
        }

    ComplexMatrix u(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const ComplexVector vk = v.column(paired[k]);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) u(r, c) += vk[r] * std::conj(left[k][c]);
    }
    // Every unitary gives an upper bound; U = I is exact for commuting arguments.
    return std::min((ra - matmul(rb, u)).frobenius_norm(), (ra - rb).frobenius_norm());
}

double frobenius_distance(const DensityMatrix& a, const DensityMatrix& b) {
    return (a.matrix() - b.matrix()).frobenius_norm();
}

}  // namespace

double trace_inner_product(const DensityMatrix& a, const DensityMatrix& b) {
    require_same_dim(a, b, "trace_inner_product");
    const Complex t = trace_of_product(a.matrix(), b.matrix());
    if (std::abs(t.imag()) > 1e-9) throw NumericError("trace_inner_product: imaginary residue " + std::to_string(t.imag()));
    return t.real();
}

std::pair<DensityMatrix, DensityMatrix> appendix_counterexample_pair(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("appendix_counterexample: alpha must lie in [0, 1]");
    const double diag_a[] = {alpha, 1.0 - alpha};
    const double diag_b[] = {1.0, 0.0};
    return {DensityMatrix(ComplexMatrix::diagonal(diag_a)), DensityMatrix(ComplexMatrix::diagonal(diag_b))};
}

double appendix_counterexample(double alpha) {
    const auto [a, b] = appendix_counterexample_pair(alpha);
    return trace_inner_product(a, a) - trace_inner_product(a, b);
}

double vn_divergence(const DensityMatrix& a, const DensityMatrix& b) {
    require_same_dim(a, b, "vn_divergence");
    const ComplexMatrix diff = matrix_log(a.matrix()) - matrix_log(b.matrix());
    return trace_of_product(a.matrix(), diff).real();
}

double sym_vn(const DensityMatrix& a, const DensityMatrix& b) {
    // Summed in a fixed order so the result is bitwise symmetric.
    const double ab = vn_divergence(a, b);
    const double ba = vn_divergence(b, a);
    return ab <= ba ? 0.5 * (ab + ba) : 0.5 * (ba + ab);
}

namespace {

double bures(const DensityMatrix& a, const DensityMatrix& b, const char* what) {
    require_same_dim(a, b, what);
    return bures_distance(psd_sqrt(a.matrix()), psd_sqrt(b.matrix()));
}

}  // namespace

// All three go through the Bures distance D: sqrt F = 1 - D^2 / 2. Taking the
// trace of sqrt(sqrt(a) b sqrt(a)) directly loses eigenvalues near the noise
// floor, and 1 - F cancels.
double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
    const double d = bures(a, b, "fidelity");
    const double root_f = std::clamp(1.0 - 0.5 * d * d, 0.0, 1.0);
    return root_f * root_f;
}

double fidelity_distance(const DensityMatrix& a, const DensityMatrix& b) {
    const double d = bures(a, b, "fidelity_distance");
    return std::clamp(d * d - 0.25 * d * d * d * d, 0.0, 1.0);
}

double sqrt_fidelity_distance(const DensityMatrix& a, const DensityMatrix& b) {
    const double d = bures(a, b, "sqrt_fidelity_distance");
    const double root_f = std::clamp(1.0 - 0.5 * d * d, 0.0, 1.0);
    return d * std::sqrt(0.5 * (1.0 + root_f));
}

DensityMatrix random_density(std::size_t dim, std::mt19937_64& rng) {
    if (dim == 0) throw DomainError("random_density: dimension must be positive");
    std::uniform_int_distribution<std::size_t> count(1, dim);
    std::normal_distribution<double> gauss;
    std::gamma_distribution<double> gamma(1.0, 1.0);
    const std::size_t m = count(rng);
    std::vector<ComplexVector> states;
    std::vector<double> weights;
    double total = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
        ComplexVector v(dim);
        double norm = 0.0;
        while (norm < 1e-6) {
            for (auto& x : v) x = {gauss(rng), gauss(rng)};
            norm = v.norm();
        }
        v *= 1.0 / norm;
        states.push_back(std::move(v));
        weights.push_back(gamma(rng));
        total += weights.back();
    }
    ComplexMatrix rho(dim, dim);
    for (std::size_t s = 0; s < m; ++s) {
        const double p = weights[s] / total;
        for (std::size_t i = 0; i < dim; ++i) {
            rho(i, i) += p * std::norm(states[s][i]);
            for (std::size_t j = i + 1; j < dim; ++j) rho(i, j) += p * states[s][i] * std::conj(states[s][j]);
        }
    }
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j) rho(j, i) = std::conj(rho(i, j));
    return DensityMatrix(std::move(rho));
}

std::vector<Metric> standard_metrics() {
    auto metric = [](std::string name, Metric::Fn value, Metric::Fn distance) {
        Metric m;
        m.name = std::move(name);
        m.value = std::move(value);
        m.distance = std::move(distance);
        return m;
    };
    std::vector<Metric> out;
    out.push_back(metric("trace inner product", trace_inner_product,
                         [](const DensityMatrix& a, const DensityMatrix& b) {
                             return trace_inner_product(a, a) - trace_inner_product(a, b);
                         }));
    out.back().seeded_pairs.push_back(appendix_counterexample_pair(0.75));
    out.push_back(metric("VN divergence", vn_divergence, vn_divergence));
    out.push_back(metric("sym-VN", sym_vn, sym_vn));
    out.push_back(metric("Fidelity", fidelity, fidelity_distance));
    out.push_back(metric("square root of Fidelity", fidelity, sqrt_fidelity_distance));
    return out;
}

const char* axiom_name(Axiom a) {
    switch (a) {
        case Axiom::non_negativity: return "non-negativity";
        case Axiom::identity: return "identity";
        case Axiom::symmetry: return "symmetry";
        case Axiom::triangle: return "triangle inequality";
    }
    return "?";
}

namespace {

// Checks one axiom on the given matrices (pair or triple). Returns the
// evaluations when the axiom is broken.
std::optional<std::vector<double>> check_axiom(const Metric& metric, Axiom axiom,
                                               const std::vector<DensityMatrix>& m, std::string& detail) {
    const double tol = kAuditTolerance;
    std::ostringstream msg;
    msg << std::setprecision(17);
    switch (axiom) {
        case Axiom::non_negativity: {
            const double d = metric.distance(m[0], m[1]);
            if (d < -tol) {
                msg << "d(a, b) = " << d;
                detail = msg.str();
                return std::vector<double>{d};
            }
            return std::nullopt;
        }
        case Axiom::identity: {
            const double self = metric.distance(m[0], m[0]);
            if (std::abs(self) > tol) {
                msg << "d(a, a) = " << self;
                detail = msg.str();
                return std::vector<double>{self};
            }
            const double sep = frobenius_distance(m[0], m[1]);
            if (sep > 1e-6) {
                const double d = metric.distance(m[0], m[1]);
                if (d <= tol) {
                    msg << "d(a, b) = " << d << " with ||a - b||_F = " << sep;
                    detail = msg.str();
                    return std::vector<double>{d, sep};
                }
            }
            return std::nullopt;
        }
        case Axiom::symmetry: {
            const double ab = metric.value(m[0], m[1]);
            const double ba = metric.value(m[1], m[0]);
            if (std::abs(ab - ba) > tol) {
                msg << "f(a, b) = " << ab << ", f(b, a) = " << ba;
                detail = msg.str();
                return std::vector<double>{ab, ba};
            }
            return std::nullopt;
        }
        case Axiom::triangle: {
            if (m.size() < 3) return std::nullopt;
            const double ac = metric.distance(m[0], m[2]);
            const double ab = metric.distance(m[0], m[1]);
            const double bc = metric.distance(m[1], m[2]);
            if (ac > ab + bc + tol) {
                msg << "d(a, c) = " << ac << " > d(a, b) + d(b, c) = " << ab + bc;
                detail = msg.str();
                return std::vector<double>{ac, ab, bc};
            }
            return std::nullopt;
        }
    }
    return std::nullopt;
}

constexpr Axiom kAxioms[kAxiomCount] = {Axiom::non_negativity, Axiom::identity, Axiom::symmetry, Axiom::triangle};

struct TrialOutcome {
    bool failed[kAxiomCount] = {};
    std::optional<Counterexample> found[kAxiomCount];
};

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    std::uint32_t raw[2];
    seq.generate(raw, raw + 2);
    return (static_cast<std::uint64_t>(raw[0]) << 32) | raw[1];
}

TrialOutcome run_case(const Metric& metric, const std::vector<DensityMatrix>& m, std::optional<std::size_t> trial,
                      std::uint64_t seed) {
    TrialOutcome out;
    for (std::size_t a = 0; a < kAxiomCount; ++a) {
        std::string detail;
        auto values = check_axiom(metric, kAxioms[a], m, detail);
        if (!values) continue;
        out.failed[a] = true;
        out.found[a] = Counterexample{kAxioms[a], trial, seed, m, std::move(*values), std::move(detail)};
    }
    return out;
}

}  // namespace

bool reproduces(const Metric& metric, const Counterexample& c) {
    std::string detail;
    return check_axiom(metric, c.axiom, c.matrices, detail).has_value();
}

MetricAuditReport audit_metric(const Metric& metric, std::size_t trials, std::span<const std::size_t> dims,
                               std::uint64_t seed) {
    if (trials == 0) throw DomainError("audit_metric: at least one trial is required");
    if (dims.empty()) throw DomainError("audit_metric: no dimensions given");
    MetricAuditReport report;
    report.metric = metric.name;
    report.complexity = metric.complexity;
    report.trials = trials;

    std::vector<TrialOutcome> seeded;
    for (const auto& [a, b] : metric.seeded_pairs) seeded.push_back(run_case(metric, {a, b}, std::nullopt, seed));

    std::vector<TrialOutcome> outcomes(trials);
    parallel_for(trials, [&](std::size_t t) {
        const std::uint64_t s = trial_seed(seed, t);
        std::mt19937_64 rng(s);
        const std::size_t dim = dims[t % dims.size()];
        std::vector<DensityMatrix> m;
        for (int i = 0; i < 3; ++i) m.push_back(random_density(dim, rng));
        outcomes[t] = run_case(metric, m, t, s);
    });

    auto absorb = [&](const TrialOutcome& o) {
        for (std::size_t a = 0; a < kAxiomCount; ++a) {
            auto& r = report.axioms[a];
            ++r.checks;
            if (!o.failed[a]) continue;
            ++r.failures;
            if (!r.counterexample) r.counterexample = o.found[a];
        }
    };
    for (const auto& o : seeded) absorb(o);
    for (const auto& o : outcomes) absorb(o);
    for (auto& r : report.axioms) r.violated = r.counterexample && reproduces(metric, *r.counterexample);
    return report;
}

void write_audit_table(std::ostream& out, std::span<const MetricAuditReport> reports) {
    out << "metric\tnon-negativity\tidentity\tsymmetry\ttriangle inequality\tdifferentiability\tcomputing "
           "complexity\ttrials\n";
    for (const auto& r : reports) {
        out << r.metric;
        for (const auto& a : r.axioms) out << '\t' << (a.violated ? '-' : '+');
        out << "\tn/a\t" << r.complexity << '\t' << r.trials << '\n';
    }
}

void write_counterexamples(std::ostream& out, std::span<const MetricAuditReport> reports) {
    out << "metric\taxiom\ttrial\tseed\tfailures\tdetail\n";
    for (const auto& r : reports)
        for (const auto& a : r.axioms) {
            if (!a.counterexample) continue;
            const auto& c = *a.counterexample;
            out << r.metric << '\t' << axiom_name(c.axiom) << '\t'
                << (c.trial ? std::to_string(*c.trial) : std::string("seeded")) << '\t' << c.seed << '\t'
                << a.failures << '/' << a.checks << '\t' << c.detail << '\n';
        }
}

}  // namespace cnm
