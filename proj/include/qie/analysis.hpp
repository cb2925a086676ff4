#pragma once

// Constants behind the existence and continuity results: c_e, c_a, the ball I,
// the C1 bound M of g on I, Q, the contraction factor sigma, and the
// smallness condition c_a M (||u0|| + 1)^2 Q <= rho / 2.

#include "qie/error.hpp"
#include "qie/expr.hpp"
#include "qie/model.hpp"
#include "qie/sampling.hpp"
#include "qie/sobolev_constants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace qie {

enum class Provenance { RigorousBound, SampledEstimate, Override };

inline const char* to_string(Provenance p) {
    switch (p) {
    case Provenance::RigorousBound: return "rigorous-bound";
    case Provenance::SampledEstimate: return "sampled-estimate";
    case Provenance::Override: return "override";
    }
    return "?";
}

inline double ball_radius_I(double c_e, double u0_norm) { return c_e * (u0_norm + 1.0); }

struct C1Estimate {
    double value;  ///< the bound used downstream (inflated when sampled)
    double raw;    ///< before inflation; equals value for rigorous bounds
    Provenance provenance;
};

struct SamplingBudget {
    int interior_per_component = 4096;
    int boundary_per_component = 1024;
    double safety_factor = 1.1;
};

/// ||g||_{C1(I)} = sum_m ( sup_I |g_m| + sum_n sup_I |d g_m / d z_n| ).
/// Polynomial g: sum |c_beta| r^|beta| per entry, rigorous. Otherwise the sups
/// are sampled on a quasi-random point set of I and the total is inflated by
/// the safety factor.
inline C1Estimate c1_norm_on_ball(const NonlinearitySpec& g, double r_I, std::uint64_t seed = 0,
                                  const SamplingBudget& budget = {}) {
    const int N = g.arity();
    if (g.all_polynomial()) {
        double total = 0;
        for (int m = 0; m < N; ++m) {
            total += to_polynomial(g.component(m), N)->sup_bound_on_ball(r_I);
            for (int n = 0; n < N; ++n) {
                auto p = to_polynomial(g.gradient(m, n), N);
                // Derivatives of polynomials are polynomials; differentiate keeps the form.
                if (!p) throw InternalError("derivative of a polynomial is not polynomial");
                total += p->sup_bound_on_ball(r_I);
            }
        }
        return {total, total, Provenance::RigorousBound};
    }

    std::vector<double> sup_g(static_cast<std::size_t>(N), 0.0);
    std::vector<double> sup_dg(static_cast<std::size_t>(N * N), 0.0);
    auto pts = ball_point_set(N, r_I, budget.interior_per_component * N, budget.boundary_per_component * N, seed);
    for (const auto& z : pts) {
        for (int m = 0; m < N; ++m) {
            auto mi = static_cast<std::size_t>(m);
            sup_g[mi] = std::max(sup_g[mi], std::abs(evaluate(g.component(m), z)));
            for (int n = 0; n < N; ++n) {
                auto k = static_cast<std::size_t>(m * N + n);
                sup_dg[k] = std::max(sup_dg[k], std::abs(evaluate(g.gradient(m, n), z)));
            }
        }
    }
    double raw = 0;
    for (double s : sup_g) raw += s;
    for (double s : sup_dg) raw += s;
    return {budget.safety_factor * raw, raw, Provenance::SampledEstimate};
}

inline C1Estimate estimate_M(const NonlinearitySpec& g, double r_I, std::uint64_t seed = 0,
                             const SamplingBudget& budget = {}) {
    return c1_norm_on_ball(g, r_I, seed, budget);
}

/// ||g1 - g2||_{C1(I)} under the same rigorous/sampled policy as estimate_M.
inline C1Estimate c1_distance(const NonlinearitySpec& g1, const NonlinearitySpec& g2, double r_I,
                              std::uint64_t seed = 0, const SamplingBudget& budget = {}) {
    return c1_norm_on_ball(g1 - g2, r_I, seed, budget);
}

/// Q = (sum_m ||T_m||^2 ||K_m||_W21^2)^(1/2).
inline double compute_Q(const std::vector<double>& operator_norms, const std::vector<double>& kernel_w21) {
    if (operator_norms.size() != kernel_w21.size()) throw ConfigError("compute_Q: size mismatch");
    double s = 0;
    for (std::size_t m = 0; m < operator_norms.size(); ++m) {
        double t = operator_norms[m] * kernel_w21[m];
        s += t * t;
    }
    return std::sqrt(s);
}

/// sigma = 2 c_a Q M (||u0|| + 1).
inline double compute_sigma(double c_a, double Q, double M, double u0_norm) {
    if (!(Q > 0)) throw ConfigError("compute_sigma: Q must be positive");
    return 2.0 * c_a * Q * M * (u0_norm + 1.0);
}

struct Theorem13Verdict {
    bool pass = false;
    double lhs = 0;             ///< c_a M (||u0|| + 1)^2 Q
    double rho = 1;
    double feasible_lo = 0;     ///< smallest admissible rho, 2 * lhs
    double feasible_hi = 1;
    bool feasible = false;      ///< [feasible_lo, 1] non-empty
    double sigma = 0;
    bool boundary_equality = false;
    std::vector<std::string> warnings;
};

/// Smallness condition lhs <= rho / 2. A pass implies sigma = 2 lhs / (||u0||+1)
/// <= rho / (||u0||+1) <= 1, strictly below 1 when ||u0|| > 0.
inline Theorem13Verdict check_theorem13(double c_a, double M, double u0_norm, double Q, double rho) {
    if (!(rho > 0 && rho <= 1)) throw ConfigError("check_theorem13: rho must lie in (0, 1]");
    Theorem13Verdict v;
    v.lhs = c_a * M * (u0_norm + 1.0) * (u0_norm + 1.0) * Q;
    v.rho = rho;
    v.feasible_lo = 2.0 * v.lhs;
    v.feasible_hi = 1.0;
    v.feasible = v.feasible_lo <= v.feasible_hi;
    v.sigma = 2.0 * c_a * Q * M * (u0_norm + 1.0);
    v.pass = v.lhs <= rho / 2.0;
    if (v.pass) {
        v.boundary_equality = std::abs(v.lhs - rho / 2.0) <= 1e-15 * rho;
        if (v.boundary_equality) v.warnings.push_back("boundary equality in the smallness condition");
        if (!(v.sigma < 1.0)) {
            // Only reachable when ||u0|| = 0 and lhs = rho/2 = 1/2: no contraction.
            v.pass = false;
            v.warnings.push_back("sigma >= 1 at boundary equality; no strict contraction");
        }
    }
    return v;
}

struct ConstantsReport {
    int d = 2;
    int N = 1;
    double c_e = 0;
    double c_a = 0;
    double u0_norm = 0;
    double r_I = 0;
    double M = 0;
    double M_raw = 0;
    double Q = 0;
    double sigma = 0;
    std::vector<double> operator_norms;
    std::vector<double> kernel_l1;
    std::vector<double> kernel_delta_l1;
    std::vector<double> kernel_w21;
    std::vector<std::string> delta_sources;
    Provenance c_e_provenance = Provenance::RigorousBound;
    Provenance c_a_provenance = Provenance::RigorousBound;
    Provenance M_provenance = Provenance::RigorousBound;
    Provenance Q_provenance = Provenance::RigorousBound;
    bool non_certified_constants = false;
    double discrete_embedding_constant = 0;
    std::string c_e_derivation;
    std::string c_a_derivation;
    Theorem13Verdict theorem13;
    std::vector<std::string> warnings;

    bool theorem13_pass() const noexcept { return theorem13.pass; }
};

struct AnalysisOptions {
    std::uint64_t seed = 0;
    SamplingBudget budget{};
    /// Overrides the C1 bound (used for the joint M of the continuity experiment).
    std::optional<C1Estimate> M_override;
};

/// Computes every constant for a materialized problem and the smallness verdict.
/// rho: the problem's value when given, otherwise 1.
inline ConstantsReport analyze(const MaterializedProblem& mp, const AnalysisOptions& opts = {}) {
    ConstantsReport r;
    const auto& spec = mp.spec;
    r.d = spec.grid.dim();
    r.N = spec.components();

    r.c_e = spec.constants.c_e.value_or(embedding_constant(r.d));
    r.c_a = spec.constants.c_a.value_or(algebra_constant(r.d));
    r.c_e_provenance = spec.constants.c_e ? Provenance::Override : Provenance::RigorousBound;
    r.c_a_provenance = spec.constants.c_a ? Provenance::Override : Provenance::RigorousBound;
    r.non_certified_constants = spec.constants.c_e.has_value() || spec.constants.c_a.has_value();
    if (r.non_certified_constants) r.warnings.push_back("non-certified constants: c_e/c_a overridden by input");
    r.c_e_derivation = embedding_constant_derivation();
    r.c_a_derivation = algebra_constant_derivation();
    r.discrete_embedding_constant = discrete_embedding_constant(spec.grid);

    r.u0_norm = mp.u0_norm;
    r.r_I = ball_radius_I(r.c_e, r.u0_norm);

    C1Estimate M = opts.M_override ? *opts.M_override : estimate_M(spec.g, r.r_I, opts.seed, opts.budget);
    r.M = M.value;
    r.M_raw = M.raw;
    r.M_provenance = M.provenance;
    if (M.provenance == Provenance::SampledEstimate)
        r.warnings.push_back("M is a sampled estimate (inflated by safety factor), not a rigorous bound");

    for (std::size_t m = 0; m < mp.kernels.size(); ++m) {
        const auto& k = mp.kernels[m];
        r.kernel_l1.push_back(l1_norm(k.K));
        r.kernel_delta_l1.push_back(l1_norm(k.deltaK));
        r.kernel_w21.push_back(tilde_w21_norm(k.K, k.deltaK));
        r.delta_sources.push_back(to_string(k.delta_source));
        if (k.delta_source == DeltaSource::Spectral)
            r.warnings.push_back("kernel " + std::to_string(m + 1) +
                                 ": Laplacian computed spectrally from tabulated samples");
    }
    r.operator_norms = mp.operator_norms;
    r.Q = compute_Q(r.operator_norms, r.kernel_w21);
    r.sigma = r.Q > 0 ? compute_sigma(r.c_a, r.Q, r.M, r.u0_norm) : 0.0;

    const double rho = spec.rho.value_or(1.0);
    r.theorem13 = check_theorem13(r.c_a, r.M, r.u0_norm, r.Q, rho);
    for (const auto& w : r.theorem13.warnings) r.warnings.push_back(w);
    for (const auto& w : mp.warnings) r.warnings.push_back(w);
    return r;
}

/// sigma / (2 M (1 - sigma)) * (||u0|| + 1) * ||g1 - g2||_{C1(I)}.
inline double continuity_bound(double sigma, double M, double u0_norm, double g_distance) {
    if (!(sigma < 1.0)) throw ConfigError("continuity_bound: requires sigma < 1");
    if (!(M > 0)) throw ConfigError("continuity_bound: requires M > 0");
    return sigma / (2.0 * M * (1.0 - sigma)) * (u0_norm + 1.0) * g_distance;
}

/// Same bound through c_a Q (||u0|| + 1)^2 ||g1 - g2|| / (1 - sigma).
inline double continuity_bound_direct(double c_a, double Q, double sigma, double u0_norm, double g_distance) {
    if (!(sigma < 1.0)) throw ConfigError("continuity_bound: requires sigma < 1");
    return c_a * Q * (u0_norm + 1.0) * (u0_norm + 1.0) * g_distance / (1.0 - sigma);
}

inline double continuity_bound(const ConstantsReport& joint, double g_distance) {
    return continuity_bound(joint.sigma, joint.M, joint.u0_norm, g_distance);
}

} // namespace qie
