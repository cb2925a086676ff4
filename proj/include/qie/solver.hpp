#pragma once

// The map t_g on the ball B_rho, Picard iteration to its fixed point u_p,
// the assembled solution u = u0 + u_p, and the continuity experiment in g.

#include "qie/analysis.hpp"
#include "qie/error.hpp"
#include "qie/model.hpp"
#include "qie/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qie {

/// Samples g_m(w(x)) at every grid point, m = 0..N-1.
inline VectorField evaluate_nonlinearity(const NonlinearitySpec& g, const VectorField& w) {
    const std::size_t N = w.count();
    if (static_cast<int>(N) != g.arity()) throw ConfigError("nonlinearity: component count mismatch");
    const Grid& grid = w.grid();
    std::vector<std::vector<double>> out(N, std::vector<double>(grid.size()));
    std::vector<double> z(N);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t n = 0; n < N; ++n) z[n] = w[n][i];
        for (std::size_t m = 0; m < N; ++m) out[m][i] = evaluate(g.component(static_cast<int>(m)), z);
    }
    std::vector<ScalarField> comps;
    for (auto& v : out) comps.emplace_back(grid, std::move(v));
    return VectorField(std::move(comps));
}

/// t_g(v)_m = [T_m (u0_m + v_m)] * (K_m conv g_m(u0 + v)).
inline VectorField apply_map_tg(const MaterializedProblem& mp, const VectorField& v) {
    v.require_compatible(mp.u0);
    VectorField w = mp.u0 + v;
    VectorField G = evaluate_nonlinearity(mp.g(), w);
    std::vector<ScalarField> out;
    for (std::size_t m = 0; m < w.count(); ++m) {
        ScalarField conv = convolve(mp.kernels[m].K_hat, G[m]);
        ScalarField Tw = apply_operator(mp.spec.operators[m], w[m]);
        out.push_back(Tw * conv);
    }
    return VectorField(std::move(out));
}

inline VectorField assemble_solution(const VectorField& u0, const VectorField& u_p) { return u0 + u_p; }

/// ||u - u0 - [T u] (K conv g(u))||_H2 over all components, straight from the
/// original system rather than the perturbative one.
inline double residual_original_system(const MaterializedProblem& mp, const VectorField& u) {
    u.require_compatible(mp.u0);
    VectorField G = evaluate_nonlinearity(mp.g(), u);
    double s = 0;
    for (std::size_t m = 0; m < u.count(); ++m) {
        ScalarField conv = convolve(mp.kernels[m].K_hat, G[m]);
        ScalarField Tu = apply_operator(mp.spec.operators[m], u[m]);
        ScalarField r = u[m] - mp.u0[m] - Tu * conv;
        double n = h2_norm(r);
        s += n * n;
    }
    return std::sqrt(s);
}

struct TraceRow {
    int k;
    double norm;         ///< ||u^k||
    double delta;        ///< ||u^k - u^(k-1)||
    double ratio;        ///< delta_k / delta_(k-1); NaN for k = 1
    double apost_bound;  ///< sigma^k / (1 - sigma) * delta_1; NaN when sigma >= 1
};

struct IterationTrace {
    std::vector<TraceRow> rows;
    double sigma = 0;
};

/// sigma^k / (1 - sigma) * delta_1 for each recorded step k.
inline std::vector<double> a_posteriori_bound(const IterationTrace& trace, double sigma) {
    if (!(sigma < 1.0) || !(sigma >= 0.0)) throw ConfigError("a_posteriori_bound: requires 0 <= sigma < 1");
    std::vector<double> out;
    if (trace.rows.empty()) return out;
    const double delta1 = trace.rows.front().delta;
    for (const auto& row : trace.rows) out.push_back(std::pow(sigma, row.k) / (1.0 - sigma) * delta1);
    return out;
}

inline void write_trace_csv(const IterationTrace& trace, std::ostream& os) {
    os << "k,norm,delta,ratio,apost_bound\n";
    char buf[128];
    for (const auto& r : trace.rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", r.k, r.norm, r.delta, r.ratio, r.apost_bound);
        os << buf;
    }
}

struct Solution {
    VectorField u_p;
    VectorField u;
    double residual;
    int iterations;
    bool certified;
};

struct SolveOptions {
    std::optional<double> tol;  ///< default 1e-10 * max(1, ||u0||)
    int max_iter = 200;
    bool best_effort = false;
    std::optional<VectorField> start;  ///< default 0, the centre of B_rho
    double divergence_threshold = 1e6;
};

inline double default_tolerance(double u0_norm) { return 1e-10 * std::max(1.0, u0_norm); }

struct SolveResult {
    Solution solution;
    IterationTrace trace;
};

enum class SolveStatus { Converged, MaxIterations, Diverged, LeftBall, Uncertified };

inline const char* to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max-iterations";
    case SolveStatus::Diverged: return "diverged";
    case SolveStatus::LeftBall: return "left-ball";
    case SolveStatus::Uncertified: return "uncertified";
    }
    return "?";
}

struct PicardOutcome {
    SolveStatus status;
    std::optional<Solution> solution;  ///< set iff converged
    IterationTrace trace;
    double last_delta;
    std::string message;
};

/// Picard iteration u^(k+1) = t_g(u^k) from u^0 (default 0). Stops once
/// ||u^k - t_g(u^k)|| <= tol and returns u_p = u^k. Never throws for
/// iteration failures; the status says what happened.
inline PicardOutcome picard_iterate(const MaterializedProblem& mp, const ConstantsReport& report,
                                    const SolveOptions& opts = {}) {
    const bool certified = report.theorem13.pass;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    IterationTrace trace;
    trace.sigma = report.sigma;
    if (!certified && !opts.best_effort)
        return {SolveStatus::Uncertified, std::nullopt, trace, nan,
                "problem is not certified (smallness condition fails); use best-effort mode"};

    const double tol = opts.tol.value_or(default_tolerance(mp.u0_norm));
    if (!(tol > 0)) throw ConfigError("picard_solve: tol must be positive");
    if (opts.max_iter < 1) throw ConfigError("picard_solve: max_iter must be >= 1");

    const double rho = report.theorem13.rho;
    const double sigma = report.sigma;
    const double blowup = opts.divergence_threshold * (mp.u0_norm + 1.0);

    VectorField u = opts.start ? *opts.start : VectorField::zeros(mp.grid(), mp.components());
    u.require_compatible(mp.u0);
    if (certified && h2_norm_vector(u) > rho * (1 + 1e-12))
        throw ConfigError("picard_solve: start point lies outside B_rho");

    double delta1 = 0;
    double last_delta = nan;
    for (int k = 0; k < opts.max_iter; ++k) {
        std::optional<VectorField> next;
        try {
            next = apply_map_tg(mp, u);
        } catch (const DomainError& e) {
            if (certified) throw;
            return {SolveStatus::Diverged, std::nullopt, std::move(trace), last_delta,
                    std::string("diverged: ") + e.what()};
        }
        const double residual = h2_norm_vector(u - *next);
        if (residual <= tol) {
            VectorField total = assemble_solution(mp.u0, u);
            return {SolveStatus::Converged, Solution{u, std::move(total), residual, k, certified}, std::move(trace),
                    last_delta, "converged"};
        }

        const double norm = h2_norm_vector(*next);
        if (k == 0) delta1 = residual;
        trace.rows.push_back({k + 1, norm, residual, k == 0 ? nan : residual / last_delta,
                              sigma < 1.0 ? std::pow(sigma, k + 1) / (1.0 - sigma) * delta1 : nan});
        last_delta = residual;

        if (!std::isfinite(norm) || !std::isfinite(residual) || norm > blowup)
            return {SolveStatus::Diverged, std::nullopt, std::move(trace), residual,
                    "diverged: iterate norm " + std::to_string(norm) + " after " + std::to_string(k + 1) + " steps"};
        if (certified && norm > rho * (1 + 1e-9) + 1e-12)
            return {SolveStatus::LeftBall, std::nullopt, std::move(trace), residual,
                    "iterate left B_rho on a certified problem: ||u^" + std::to_string(k + 1) +
                        "|| = " + std::to_string(norm) + " > rho = " + std::to_string(rho)};
        u = std::move(*next);
    }
    return {SolveStatus::MaxIterations, std::nullopt, std::move(trace), last_delta,
            "no convergence within " + std::to_string(opts.max_iter) + " iterations; last step " +
                std::to_string(last_delta)};
}

/// Throwing front end of picard_iterate: AssumptionViolation for an
/// uncertified problem without best_effort, NonConvergence for max_iter or
/// divergence, InternalError when a certified iterate leaves B_rho.
inline SolveResult picard_solve(const MaterializedProblem& mp, const ConstantsReport& report,
                                const SolveOptions& opts = {}) {
    PicardOutcome o = picard_iterate(mp, report, opts);
    switch (o.status) {
    case SolveStatus::Converged: return {std::move(*o.solution), std::move(o.trace)};
    case SolveStatus::Uncertified: throw AssumptionViolation(o.message);
    case SolveStatus::LeftBall: throw InternalError(o.message);
    default: throw NonConvergence(o.message, o.last_delta, static_cast<int>(o.trace.rows.size()));
    }
}

struct ContinuityReport {
    double measured = 0;       ///< ||u_1 - u_2||_H2
    double bound = 0;
    double bound_direct = 0;   ///< same bound via c_a Q (||u0||+1)^2 / (1 - sigma)
    double g_distance = 0;     ///< ||g1 - g2||_{C1(I)}
    Provenance g_distance_provenance = Provenance::RigorousBound;
    double M1 = 0;
    double M2 = 0;
    ConstantsReport joint;     ///< constants with M = max(M1, M2)
    int iterations1 = 0;
    int iterations2 = 0;
    double tol = 0;
    bool pass = false;
};

/// Solves the system for g1 and for g2 and compares the distance of the
/// solutions against the continuity bound, using M = max(M1, M2) for both.
inline ContinuityReport continuity_experiment(const MaterializedProblem& base, const NonlinearitySpec& g1,
                                              const NonlinearitySpec& g2, std::optional<double> tol = {},
                                              const AnalysisOptions& opts = {}) {
    if (g1.arity() != base.components() || g2.arity() != base.components())
        throw ConfigError("continuity: g arity must equal the component count");
    MaterializedProblem p1 = base;
    p1.spec.g = g1;
    MaterializedProblem p2 = base;
    p2.spec.g = g2;

    const double c_e = base.spec.constants.c_e.value_or(embedding_constant(base.grid().dim()));
    const double r_I = ball_radius_I(c_e, base.u0_norm);
    C1Estimate M1 = estimate_M(g1, r_I, opts.seed, opts.budget);
    C1Estimate M2 = estimate_M(g2, r_I, opts.seed, opts.budget);
    C1Estimate joint = M1.value >= M2.value ? M1 : M2;
    if (M1.provenance == Provenance::SampledEstimate || M2.provenance == Provenance::SampledEstimate)
        joint.provenance = Provenance::SampledEstimate;

    AnalysisOptions jopts = opts;
    jopts.M_override = joint;
    ContinuityReport rep;
    rep.joint = analyze(p1, jopts);
    rep.M1 = M1.value;
    rep.M2 = M2.value;
    if (!rep.joint.theorem13.pass)
        throw AssumptionViolation("continuity: smallness condition fails with the joint M = max(M1, M2)");

    rep.tol = tol.value_or(default_tolerance(base.u0_norm));
    SolveOptions sopts;
    sopts.tol = rep.tol;
    auto s1 = picard_solve(p1, rep.joint, sopts);
    auto s2 = picard_solve(p2, rep.joint, sopts);
    rep.iterations1 = s1.solution.iterations;
    rep.iterations2 = s2.solution.iterations;
    rep.measured = h2_norm_vector(s1.solution.u - s2.solution.u);

    C1Estimate dist = c1_distance(g1, g2, r_I, opts.seed, opts.budget);
    rep.g_distance = dist.value;
    rep.g_distance_provenance = dist.provenance;
    rep.bound = continuity_bound(rep.joint, rep.g_distance);
    rep.bound_direct = continuity_bound_direct(rep.joint.c_a, rep.joint.Q, rep.joint.sigma, rep.joint.u0_norm,
                                               rep.g_distance);
    rep.pass = rep.measured <= rep.bound + 2.0 * rep.tol;
    return rep;
}

} // namespace qie
