#pragma once

// JSON serialization of validation results, constants and solver summaries.
// Non-finite numbers are written as null.

#include "qie/analysis.hpp"
#include "qie/model.hpp"
#include "qie/solver.hpp"

#include <json.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace qie {

using ojson = nlohmann::ordered_json;

inline ojson number(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

inline ojson numbers(const std::vector<double>& v) {
    ojson a = ojson::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

inline ojson to_json(const ValidationReport& v) {
    ojson violations = ojson::array();
    for (const auto& x : v.violations) violations.push_back({{"code", x.code}, {"message", x.message}});
    return {{"ok", v.ok()}, {"violations", violations}, {"warnings", v.warnings}};
}

inline ojson to_json(const Theorem13Verdict& t) {
    return {{"pass", t.pass},
            {"lhs", number(t.lhs)},
            {"rho", number(t.rho)},
            {"feasible", t.feasible},
            {"feasible_rho_interval", {number(t.feasible_lo), number(t.feasible_hi)}},
            {"sigma", number(t.sigma)},
            {"boundary_equality", t.boundary_equality}};
}

inline ojson to_json(const ConstantsReport& r) {
    ojson kernels = ojson::array();
    for (std::size_t m = 0; m < r.kernel_w21.size(); ++m)
        kernels.push_back({{"l1", number(r.kernel_l1[m])},
                           {"laplacian_l1", number(r.kernel_delta_l1[m])},
                           {"w21", number(r.kernel_w21[m])},
                           {"laplacian_source", r.delta_sources[m]},
                           {"operator_norm", number(r.operator_norms[m])}});
    return {{"d", r.d},
            {"N", r.N},
            {"c_e", number(r.c_e)},
            {"c_e_provenance", to_string(r.c_e_provenance)},
            {"c_e_derivation", r.c_e_derivation},
            {"c_a", number(r.c_a)},
            {"c_a_provenance", to_string(r.c_a_provenance)},
            {"c_a_derivation", r.c_a_derivation},
            {"discrete_embedding_constant", number(r.discrete_embedding_constant)},
            {"non_certified_constants", r.non_certified_constants},
            {"u0_norm", number(r.u0_norm)},
            {"r_I", number(r.r_I)},
            {"M", number(r.M)},
            {"M_raw", number(r.M_raw)},
            {"M_provenance", to_string(r.M_provenance)},
            {"Q", number(r.Q)},
            {"Q_provenance", to_string(r.Q_provenance)},
            {"sigma", number(r.sigma)},
            {"components", kernels}};
}

inline ojson to_json(const IterationTrace& t) {
    double max_ratio = 0;
    for (const auto& row : t.rows)
        if (std::isfinite(row.ratio)) max_ratio = std::max(max_ratio, row.ratio);
    return {{"steps", t.rows.size()}, {"max_step_ratio", t.rows.size() > 1 ? number(max_ratio) : ojson(nullptr)}};
}

inline ojson to_json(const PicardOutcome& o) {
    ojson j = {{"status", to_string(o.status)}, {"message", o.message}};
    if (o.solution) {
        j["iterations"] = o.solution->iterations;
        j["residual"] = number(o.solution->residual);
        j["certified"] = o.solution->certified;
        j["u_p_norm"] = number(h2_norm_vector(o.solution->u_p));
        j["u_norm"] = number(h2_norm_vector(o.solution->u));
    } else {
        j["iterations"] = o.trace.rows.size();
        j["last_delta"] = number(o.last_delta);
    }
    j["trace"] = to_json(o.trace);
    return j;
}

inline ojson to_json(const ContinuityReport& c) {
    return {{"measured", number(c.measured)},
            {"bound", number(c.bound)},
            {"bound_direct", number(c.bound_direct)},
            {"g_distance", number(c.g_distance)},
            {"g_distance_provenance", to_string(c.g_distance_provenance)},
            {"M1", number(c.M1)},
            {"M2", number(c.M2)},
            {"M_joint", number(c.joint.M)},
            {"sigma_joint", number(c.joint.sigma)},
            {"iterations1", c.iterations1},
            {"iterations2", c.iterations2},
            {"tol", number(c.tol)},
            {"pass", c.pass}};
}

} // namespace qie
