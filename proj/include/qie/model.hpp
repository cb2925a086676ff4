#pragma once

// Problem assembly: kernels K_m, Fourier-multiplier operators T_m, initial
// data u0, the nonlinearity g and the ball radius rho, plus the checks that
// a problem meets the standing hypotheses on each of them.

#include "qie/error.hpp"
#include "qie/expr.hpp"
#include "qie/sampling.hpp"
#include "qie/sobolev_constants.hpp"
#include "qie/spectral.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace qie {

// ---------------------------------------------------------------------------
// Kernels

struct GaussianKernel {
    double alpha = 1.0;      ///< decay rate in amplitude * exp(-alpha |x|^2)
    double amplitude = 1.0;
};

struct ExpressionKernel {
    Expr expr;  ///< in x1..xd
};

struct TabulatedKernel {
    std::vector<double> values;  ///< row-major samples on the problem grid
};

using KernelSpec = std::variant<GaussianKernel, ExpressionKernel, TabulatedKernel>;

enum class DeltaSource { Symbolic, Spectral };

inline const char* to_string(DeltaSource s) { return s == DeltaSource::Symbolic ? "symbolic" : "spectral"; }

struct MaterializedKernel {
    ScalarField K;
    ScalarField deltaK;
    DeltaSource delta_source;
    SpectralField K_hat;
    double tail_mass;  ///< L1 mass fraction in the outer 10% shell
};

/// amplitude * exp(-alpha * (x1^2 + ... + xd^2)) as an expression.
inline Expr gaussian_expression(const GaussianKernel& g, int d) {
    Expr r2 = Expr::constant(0.0);
    for (int i = 0; i < d; ++i) r2 = r2 + pow(Expr::variable(i), 2);
    return Expr::constant(g.amplitude) * exp(-(Expr::constant(g.alpha) * r2));
}

/// Samples an x-expression on every grid point. Domain errors name the point.
inline ScalarField sample_expression(const Expr& e, const Grid& grid) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto x = grid.point(i);
        try {
            v[i] = evaluate(e, std::span<const double>(x.data(), static_cast<std::size_t>(grid.dim())));
        } catch (const DomainError& err) {
            std::ostringstream os;
            os << err.what() << " at x = (" << x[0] << ", " << x[1];
            if (grid.dim() == 3) os << ", " << x[2];
            os << ")";
            throw DomainError(os.str());
        }
    }
    return ScalarField(grid, std::move(v));
}

/// Samples K and Delta K. Delta K is symbolic for gaussian/expression kernels
/// and spectral for tabulated ones. A kernel that is zero at every grid point
/// violates nontriviality and throws unless allow_trivial is set.
inline MaterializedKernel materialize_kernel(const KernelSpec& spec, const Grid& grid, bool allow_trivial = false) {
    auto from_expr = [&](const Expr& e) {
        ScalarField K = sample_expression(e, grid);
        ScalarField dK = sample_expression(laplacian_symbolic(e, grid.dim()), grid);
        return std::pair{std::move(K), std::move(dK)};
    };

    std::optional<std::pair<ScalarField, ScalarField>> fields;
    DeltaSource source = DeltaSource::Symbolic;
    if (const auto* g = std::get_if<GaussianKernel>(&spec)) {
        if (!(g->alpha > 0) || !std::isfinite(g->alpha)) throw ConfigError("gaussian kernel: alpha must be > 0");
        if (!std::isfinite(g->amplitude)) throw ConfigError("gaussian kernel: amplitude must be finite");
        fields = from_expr(gaussian_expression(*g, grid.dim()));
    } else if (const auto* e = std::get_if<ExpressionKernel>(&spec)) {
        if (max_variable_index(e->expr) >= grid.dim()) throw ConfigError("kernel expression uses x_i beyond d");
        fields = from_expr(e->expr);
    } else {
        const auto& t = std::get<TabulatedKernel>(spec);
        ScalarField K(grid, t.values);
        ScalarField dK = laplacian(K);
        fields.emplace(std::move(K), std::move(dK));
        source = DeltaSource::Spectral;
    }

    auto& [K, dK] = *fields;
    if (K.is_zero() && !allow_trivial) throw AssumptionViolation("kernel trivial: K vanishes at every grid point");
    double tail = tail_mass_fraction(K, 1);
    SpectralField K_hat = forward_transform(K);
    return MaterializedKernel{std::move(K), std::move(dK), source, std::move(K_hat), tail};
}

// ---------------------------------------------------------------------------
// Operators T_m: diagonal Fourier multipliers m(|xi|^2)

/// (1 - Delta)^-1, multiplier 1/(1+|xi|^2).
struct InverseHelmholtz {};

struct ScaledIdentity {
    double alpha = 1.0;
};

/// p(s)/q(s) with s = |xi|^2; coefficients in increasing degree.
struct RationalMultiplier {
    std::vector<double> p;
    std::vector<double> q;
};

using OperatorSpec = std::variant<InverseHelmholtz, ScaledIdentity, RationalMultiplier>;

namespace detail {
inline double horner(const std::vector<double>& c, double s) {
    double v = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * s + *it;
    return v;
}
} // namespace detail

inline double multiplier_value(const OperatorSpec& spec, double xi2) {
    return std::visit(
        [xi2](const auto& op) -> double {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, InverseHelmholtz>) return 1.0 / (1.0 + xi2);
            else if constexpr (std::is_same_v<T, ScaledIdentity>) return op.alpha;
            else return detail::horner(op.p, xi2) / detail::horner(op.q, xi2);
        },
        spec);
}

/// Checks q > 0 on the frequency lattice of `grid` for rational multipliers.
inline void validate_operator(const OperatorSpec& spec, const Grid& grid) {
    if (const auto* s = std::get_if<ScaledIdentity>(&spec)) {
        if (!std::isfinite(s->alpha)) throw ConfigError("scaled_identity: alpha must be finite");
        return;
    }
    const auto* r = std::get_if<RationalMultiplier>(&spec);
    if (!r) return;
    if (r->p.empty() || r->q.empty()) throw ConfigError("rational_multiplier: p and q need coefficients");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double q = detail::horner(r->q, grid.frequency_squared(i));
        if (!(q > 0) || !std::isfinite(q))
            throw ConfigError("rational_multiplier: q must be positive on the frequency lattice");
    }
}

inline ScalarField apply_operator(const OperatorSpec& spec, const ScalarField& f) {
    if (const auto* s = std::get_if<ScaledIdentity>(&spec)) return s->alpha * f;
    return apply_multiplier(f, [&spec](double xi2) { return multiplier_value(spec, xi2); });
}

/// sup over the frequency lattice of |m(|xi|^2)|; equals the H2 -> H2 norm
/// since the multiplier commutes with the weight (1+|xi|^4).
inline double operator_norm(const OperatorSpec& spec, const Grid& grid) {
    validate_operator(spec, grid);
    double sup = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        sup = std::max(sup, std::abs(multiplier_value(spec, grid.frequency_squared(i))));
    if (!(sup > 0)) throw AssumptionViolation("operator norm is zero: T must satisfy ||T|| > 0");
    if (!std::isfinite(sup)) throw AssumptionViolation("operator norm is not finite");
    return sup;
}

// ---------------------------------------------------------------------------
// Problem

using FieldSpec = std::variant<Expr, std::vector<double>>;

struct ConstantOverrides {
    std::optional<double> c_e;
    std::optional<double> c_a;
};

struct ProblemSpec {
    Grid grid;
    std::vector<KernelSpec> kernels;
    std::vector<OperatorSpec> operators;
    NonlinearitySpec g;
    std::vector<FieldSpec> u0;
    std::optional<double> rho;
    ConstantOverrides constants;

    int components() const noexcept { return g.arity(); }

    void check_shape() const {
        const auto n = static_cast<std::size_t>(components());
        if (kernels.size() != n || operators.size() != n || u0.size() != n)
            throw ConfigError("problem: kernels, operators, u0 and g must all have N = " + std::to_string(n) +
                              " entries");
        if (rho && !(*rho > 0.0 && *rho <= 1.0)) throw ConfigError("problem: rho must lie in (0, 1]");
    }
};

/// Samples every u0_m. Throws when all components vanish unless allow_trivial.
inline VectorField materialize_u0(const ProblemSpec& problem, bool allow_trivial = false) {
    std::vector<ScalarField> comps;
    for (const auto& spec : problem.u0) {
        if (const auto* e = std::get_if<Expr>(&spec)) {
            if (max_variable_index(*e) >= problem.grid.dim()) throw ConfigError("u0 expression uses x_i beyond d");
            comps.push_back(sample_expression(*e, problem.grid));
        } else {
            comps.emplace_back(problem.grid, std::get<std::vector<double>>(spec));
        }
    }
    VectorField u0(std::move(comps));
    bool all_zero = true;
    for (const auto& c : u0) all_zero = all_zero && c.is_zero();
    if (all_zero && !allow_trivial) throw AssumptionViolation("u0 trivial: every component vanishes identically");
    return u0;
}

struct Violation {
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::vector<std::string> warnings;

    bool ok() const noexcept { return violations.empty(); }
    bool has(const std::string& code) const {
        for (const auto& v : violations)
            if (v.code == code) return true;
        return false;
    }
};

inline constexpr int nontriviality_interior_samples = 256;
inline constexpr int nontriviality_boundary_samples = 64;

/// Checks every standing hypothesis and lists all violations instead of
/// stopping at the first one.
inline ValidationReport validate_assumptions(const ProblemSpec& problem, std::uint64_t seed = 0) {
    ValidationReport report;
    auto add = [&](std::string code, std::string msg) { report.violations.push_back({std::move(code), std::move(msg)}); };

    try {
        problem.check_shape();
    } catch (const ConfigError& e) {
        add("shape", e.what());
        return report;
    }

    for (std::size_t m = 0; m < problem.kernels.size(); ++m) {
        try {
            auto k = materialize_kernel(problem.kernels[m], problem.grid, true);
            if (k.K.is_zero()) add("kernel_trivial", "kernel " + std::to_string(m + 1) + " vanishes identically");
            if (k.tail_mass > default_tail_mass_threshold)
                report.warnings.push_back("tail mass: kernel " + std::to_string(m + 1) + " has L1 fraction " +
                                          std::to_string(k.tail_mass) + " in the outer 10% shell");
        } catch (const DomainError& e) {
            add("kernel_domain_error", "kernel " + std::to_string(m + 1) + ": " + e.what());
        } catch (const ConfigError& e) {
            add("kernel_invalid", "kernel " + std::to_string(m + 1) + ": " + e.what());
        }
    }

    for (std::size_t m = 0; m < problem.operators.size(); ++m) {
        try {
            operator_norm(problem.operators[m], problem.grid);
        } catch (const std::runtime_error& e) {
            add("operator_norm_invalid", "operator " + std::to_string(m + 1) + ": " + e.what());
        }
    }

    double u0_norm = 0;
    try {
        VectorField u0 = materialize_u0(problem, true);
        bool all_zero = true;
        for (std::size_t m = 0; m < u0.count(); ++m) {
            all_zero = all_zero && u0[m].is_zero();
            double tail = tail_mass_fraction(u0[m], 2);
            if (tail > default_tail_mass_threshold)
                report.warnings.push_back("tail mass: u0 component " + std::to_string(m + 1) + " has L2 fraction " +
                                          std::to_string(tail) + " in the outer 10% shell");
        }
        if (all_zero) add("u0_trivial", "u0 vanishes identically in every component");
        u0_norm = h2_norm_vector(u0);
    } catch (const DomainError& e) {
        add("u0_domain_error", e.what());
    } catch (const ConfigError& e) {
        add("u0_invalid", e.what());
    }

    const auto& g = problem.g;
    if (!check_zero_at_origin(g)) add("g_nonzero_at_origin", "g(0) ≠ 0");

    const double c_e = problem.constants.c_e.value_or(embedding_constant(problem.grid.dim()));
    const double r_I = c_e * (u0_norm + 1.0);
    bool vanishes = true;
    bool domain_error = false;
    for (const auto& z : ball_point_set(g.arity(), r_I, nontriviality_interior_samples,
                                        nontriviality_boundary_samples, seed)) {
        for (const auto& c : g.components()) {
            try {
                if (evaluate(c, z) != 0.0) vanishes = false;
            } catch (const DomainError&) {
                domain_error = true;
            }
        }
    }
    if (domain_error) add("g_domain_error", "g is not defined everywhere on the ball I");
    if (vanishes) add("g_vanishes_identically", "g vanishes identically on the ball I");

    return report;
}

/// Everything the solver and the constants need, sampled once.
struct MaterializedProblem {
    ProblemSpec spec;
    std::vector<MaterializedKernel> kernels;
    std::vector<double> operator_norms;
    VectorField u0;
    double u0_norm;
    std::vector<std::string> warnings;

    const Grid& grid() const noexcept { return spec.grid; }
    int components() const noexcept { return spec.components(); }
    const NonlinearitySpec& g() const noexcept { return spec.g; }
};

/// Samples kernels and u0 and computes operator norms. With allow_degenerate a
/// zero kernel or zero u0 is kept (diagnostic runs); otherwise it throws
/// AssumptionViolation.
inline MaterializedProblem materialize(const ProblemSpec& problem, bool allow_degenerate = false) {
    problem.check_shape();
    std::vector<MaterializedKernel> kernels;
    std::vector<double> norms;
    std::vector<std::string> warnings;
    for (std::size_t m = 0; m < problem.kernels.size(); ++m) {
        kernels.push_back(materialize_kernel(problem.kernels[m], problem.grid, allow_degenerate));
        if (kernels.back().tail_mass > default_tail_mass_threshold)
            warnings.push_back("tail mass: kernel " + std::to_string(m + 1) + " exceeds threshold");
        if (allow_degenerate) {
            validate_operator(problem.operators[m], problem.grid);
            double sup = 0;
            for (std::size_t i = 0; i < problem.grid.size(); ++i)
                sup = std::max(sup, std::abs(multiplier_value(problem.operators[m], problem.grid.frequency_squared(i))));
            norms.push_back(sup);
        } else {
            norms.push_back(operator_norm(problem.operators[m], problem.grid));
        }
    }
    VectorField u0 = materialize_u0(problem, allow_degenerate);
    for (std::size_t m = 0; m < u0.count(); ++m)
        if (tail_mass_fraction(u0[m], 2) > default_tail_mass_threshold)
            warnings.push_back("tail mass: u0 component " + std::to_string(m + 1) + " exceeds threshold");
    double n = h2_norm_vector(u0);
    return MaterializedProblem{problem, std::move(kernels), std::move(norms), std::move(u0), n, std::move(warnings)};
}

} // namespace qie
