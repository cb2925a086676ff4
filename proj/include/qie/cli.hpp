#pragma once

// The qie command line: check, solve, continuity and oracle subcommands.
// Exit codes: 0 success, 1 hypothesis or bound failure, 2 input error,
// 3 non-convergence.

#include "qie/analysis.hpp"
#include "qie/error.hpp"
#include "qie/model.hpp"
#include "qie/oracle.hpp"
#include "qie/problem_io.hpp"
#include "qie/report.hpp"
#include "qie/solver.hpp"
#include "qie/spectral.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qie::cli {

inline constexpr const char* tool_version = "1.0.0";

enum ExitCode : int { Success = 0, HypothesisFailure = 1, InputError = 2, NoConvergence = 3 };

inline std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw InternalError("sha256 digest failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

struct Input {
    std::string path;
    std::string digest;
    json document;
};

inline Input load_input(const std::string& path) {
    std::string text = read_file(path);
    return {path, sha256_hex(text), parse_json_text(text, path)};
}

inline ojson report_header(const std::string& command, const Input& in, std::uint64_t seed) {
    return {{"tool", {{"name", "qie"}, {"version", tool_version}}},
            {"command", command},
            {"input", {{"file", in.path}, {"sha256", in.digest}, {"seed", seed}}}};
}

inline void emit(const ojson& report, std::ostream& out, const std::optional<std::string>& out_path) {
    const std::string text = report.dump(2) + "\n";
    if (out_path) {
        std::ofstream f(*out_path, std::ios::binary);
        if (!f) throw ConfigError("cannot write '" + *out_path + "'");
        f << text;
    } else {
        out << text;
    }
}

inline void finish(ojson& report, const std::vector<std::string>& warnings, int code) {
    report["warnings"] = warnings;
    report["exit_code"] = code;
}

struct CommonArgs {
    std::string file;
    std::uint64_t seed = 0;
    std::optional<std::string> out;
};

/// Runs f and maps the error classes onto exit codes.
template <class F>
int guarded(std::ostream& err, F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        err << "error: parse: " << e.what() << "\n";
        return InputError;
    } catch (const ConfigError& e) {
        err << "error: input: " << e.what() << "\n";
        return InputError;
    } catch (const AssumptionViolation& e) {
        err << "error: hypothesis: " << e.what() << "\n";
        return HypothesisFailure;
    } catch (const DomainError& e) {
        err << "error: domain: " << e.what() << "\n";
        return HypothesisFailure;
    } catch (const NonConvergence& e) {
        err << "error: non-convergence: " << e.what() << "\n";
        return NoConvergence;
    } catch (const InternalError& e) {
        err << "error: internal: " << e.what() << "\n";
        return HypothesisFailure;
    }
}

struct Checked {
    ProblemSpec spec;
    ValidationReport validation;
    std::optional<MaterializedProblem> mp;
    std::optional<ConstantsReport> constants;
};

/// Validation plus constants. constants stays empty when validation fails.
inline Checked run_check(const Input& in, std::uint64_t seed) {
    Checked c{problem_from_json(in.document), {}, std::nullopt, std::nullopt};
    c.validation = validate_assumptions(c.spec, seed);
    if (!c.validation.ok()) return c;
    c.mp = materialize(c.spec);
    AnalysisOptions opts;
    opts.seed = seed;
    c.constants = analyze(*c.mp, opts);
    return c;
}

inline void add_check_sections(ojson& report, const Checked& c, std::vector<std::string>& warnings) {
    report["validation"] = to_json(c.validation);
    // Once materialized, the constants report carries the same tail-mass warnings.
    if (!c.constants)
        for (const auto& w : c.validation.warnings) warnings.push_back(w);
    if (c.constants) {
        report["constants"] = to_json(*c.constants);
        report["theorem13"] = to_json(c.constants->theorem13);
        for (const auto& w : c.constants->warnings) warnings.push_back(w);
    }
}

inline int cmd_check(const CommonArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        Input in = load_input(args.file);
        Checked c = run_check(in, args.seed);
        ojson report = report_header("check", in, args.seed);
        std::vector<std::string> warnings;
        add_check_sections(report, c, warnings);
        int code = c.constants && c.constants->theorem13.pass ? Success : HypothesisFailure;
        for (const auto& v : c.validation.violations) err << "violation: " << v.code << ": " << v.message << "\n";
        if (c.constants && !c.constants->theorem13.pass)
            err << "smallness condition fails: lhs " << c.constants->theorem13.lhs << " > rho/2\n";
        finish(report, warnings, code);
        emit(report, out, args.out);
        return code;
    });
}

struct SolveArgs {
    CommonArgs common;
    std::optional<double> tol;
    int max_iter = 200;
    std::optional<std::string> trace;
    bool best_effort = false;
};

inline int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        Input in = load_input(args.common.file);
        Checked c = run_check(in, args.common.seed);
        ojson report = report_header("solve", in, args.common.seed);
        std::vector<std::string> warnings;
        add_check_sections(report, c, warnings);
        int code = Success;
        if (!c.constants) {
            for (const auto& v : c.validation.violations) err << "violation: " << v.code << ": " << v.message << "\n";
            code = HypothesisFailure;
        } else {
            SolveOptions so;
            so.tol = args.tol;
            so.max_iter = args.max_iter;
            so.best_effort = args.best_effort;
            PicardOutcome o = picard_iterate(*c.mp, *c.constants, so);
            report["solve"] = to_json(o);
            if (args.trace && o.status != SolveStatus::Uncertified) {
                std::ofstream f(*args.trace, std::ios::binary);
                if (!f) throw ConfigError("cannot write '" + *args.trace + "'");
                write_trace_csv(o.trace, f);
            }
            switch (o.status) {
            case SolveStatus::Converged:
                if (!o.solution->certified) warnings.push_back("best-effort solve of an uncertified problem");
                break;
            case SolveStatus::Uncertified: code = HypothesisFailure; break;
            case SolveStatus::LeftBall: code = HypothesisFailure; break;
            case SolveStatus::MaxIterations:
            case SolveStatus::Diverged: code = NoConvergence; break;
            }
            if (code != Success) err << o.message << "\n";
        }
        finish(report, warnings, code);
        emit(report, out, args.common.out);
        return code;
    });
}

struct ContinuityArgs {
    CommonArgs common;
    std::string g2_file;
    std::optional<double> tol;
};

inline int cmd_continuity(const ContinuityArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        Input in = load_input(args.common.file);
        Input in2 = load_input(args.g2_file);
        if (!in2.document.is_object() || !in2.document.contains("g"))
            throw ConfigError(args.g2_file + ": expected a document with a 'g' list");
        NonlinearitySpec g2 = parse_nonlinearity(in2.document.at("g"), args.g2_file + ": g");

        Checked c = run_check(in, args.common.seed);
        ojson report = report_header("continuity", in, args.common.seed);
        report["input"]["g2_file"] = in2.path;
        report["input"]["g2_sha256"] = in2.digest;
        std::vector<std::string> warnings;
        add_check_sections(report, c, warnings);
        if (!c.constants) {
            for (const auto& v : c.validation.violations) err << "violation: " << v.code << ": " << v.message << "\n";
            finish(report, warnings, HypothesisFailure);
            emit(report, out, args.common.out);
            return int(HypothesisFailure);
        }
        ProblemSpec spec2 = c.spec;
        spec2.g = g2;
        ValidationReport v2 = validate_assumptions(spec2, args.common.seed);
        report["validation_g2"] = to_json(v2);
        if (!v2.ok()) {
            for (const auto& v : v2.violations) err << "violation (g2): " << v.code << ": " << v.message << "\n";
            finish(report, warnings, HypothesisFailure);
            emit(report, out, args.common.out);
            return int(HypothesisFailure);
        }
        AnalysisOptions opts;
        opts.seed = args.common.seed;
        ContinuityReport rep = continuity_experiment(*c.mp, c.spec.g, g2, args.tol, opts);
        report["continuity"] = to_json(rep);
        if (rep.g_distance_provenance == Provenance::SampledEstimate)
            warnings.push_back("||g1 - g2|| is a sampled estimate, not a rigorous bound");
        int code = rep.pass ? Success : HypothesisFailure;
        if (!rep.pass) err << "continuity bound violated: measured " << rep.measured << " > bound " << rep.bound << "\n";
        finish(report, warnings, code);
        emit(report, out, args.common.out);
        return code;
    });
}

using ConvolveFn = std::function<ScalarField(const ScalarField&, const ScalarField&)>;

inline ScalarField spectral_convolve(const ScalarField& K, const ScalarField& f) { return convolve(K, f); }

struct OracleArgs {
    CommonArgs common;
    std::optional<int> size;  ///< default: the budget limit for the dimension
};

namespace detail {

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.grid().size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline ojson comparison(const std::string& name, double error, double tolerance, bool pass) {
    return {{"name", name}, {"error", number(error)}, {"tolerance", tolerance}, {"pass", pass}};
}

} // namespace detail

inline constexpr double oracle_field_tolerance = 1e-10;
inline constexpr double oracle_gradient_tolerance = 1e-6;
inline constexpr double oracle_sup_tolerance = 0.02;
inline constexpr int oracle_gradient_points = 100;
inline constexpr int oracle_sup_samples = 20000;

/// Re-materializes the problem on a reduced grid and compares the fast paths
/// (FFT convolution, spectral multipliers, t_g, symbolic gradient, sampled M)
/// with the brute-force references. conv replaces the spectral convolution
/// under test.
inline int cmd_oracle(const OracleArgs& args, std::ostream& out, std::ostream& err,
                      const ConvolveFn& conv = spectral_convolve) {
    return guarded(err, [&] {
        Input in = load_input(args.common.file);
        ProblemSpec spec = problem_from_json(in.document);
        const oracle::OracleBudget budget;
        const int d = spec.grid.dim();
        const int n = args.size.value_or(d == 2 ? budget.max_n_2d : budget.max_n_3d);
        Grid small(d, n, spec.grid.half_width());
        budget.require(small);
        for (const auto& k : spec.kernels)
            if (std::holds_alternative<TabulatedKernel>(k))
                throw ConfigError("oracle: tabulated kernels cannot be resampled on a reduced grid");
        for (const auto& u : spec.u0)
            if (std::holds_alternative<std::vector<double>>(u))
                throw ConfigError("oracle: tabulated u0 cannot be resampled on a reduced grid");
        spec.grid = small;
        MaterializedProblem mp = materialize(spec);

        ojson checks = ojson::array();
        bool all = true;
        auto record = [&](const std::string& name, double error, double tol, bool pass) {
            checks.push_back(detail::comparison(name, error, tol, pass));
            all = all && pass;
        };
        auto relative = [](double diff, double scale) { return scale > 0 ? diff / scale : diff; };

        for (std::size_t m = 0; m < mp.u0.count(); ++m) {
            const std::string tag = " [" + std::to_string(m + 1) + "]";
            const ScalarField& f = mp.u0[m];
            ScalarField fast = conv(mp.kernels[m].K, f);
            ScalarField ref = oracle::direct_convolution(mp.kernels[m].K, f, budget);
            double e = relative(detail::max_abs_diff(fast, ref), sup_norm(ref));
            record("convolution" + tag, e, oracle_field_tolerance, e <= oracle_field_tolerance);

            const auto& op = spec.operators[m];
            ScalarField mfast = apply_operator(op, f);
            ScalarField mref = oracle::direct_multiplier(f, [&op](double s) { return multiplier_value(op, s); }, budget);
            e = relative(detail::max_abs_diff(mfast, mref), sup_norm(mref));
            record("multiplier" + tag, e, oracle_field_tolerance, e <= oracle_field_tolerance);
        }

        {
            VectorField zero = VectorField::zeros(small, mp.components());
            VectorField w = mp.u0;
            VectorField G = evaluate_nonlinearity(mp.g(), w);
            double diff = 0, scale = 0;
            VectorField ref = oracle::direct_map_tg(mp, zero, budget);
            for (std::size_t m = 0; m < w.count(); ++m) {
                ScalarField fast = apply_operator(spec.operators[m], w[m]) * conv(mp.kernels[m].K, G[m]);
                diff = std::max(diff, detail::max_abs_diff(fast, ref[m]));
                scale = std::max(scale, sup_norm(ref[m]));
            }
            double e = scale > 0 ? diff / scale : diff;
            record("map_tg", e, oracle_field_tolerance, e <= oracle_field_tolerance);
        }

        const double c_e = spec.constants.c_e.value_or(embedding_constant(d));
        const double r_I = ball_radius_I(c_e, mp.u0_norm);
        {
            const int N = mp.components();
            double worst = 0;
            for (const auto& z : oracle::uniform_ball_points(N, r_I, oracle_gradient_points, args.common.seed)) {
                auto J = oracle::finite_diff_gradient(mp.g(), z);
                for (int a = 0; a < N; ++a)
                    for (int b = 0; b < N; ++b) {
                        double sym = evaluate(mp.g().gradient(a, b), z);
                        double fd = J[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
                        worst = std::max(worst, std::abs(sym - fd) / std::max(1.0, std::abs(sym)));
                    }
            }
            record("gradient", worst, oracle_gradient_tolerance, worst <= oracle_gradient_tolerance);
        }
        {
            AnalysisOptions opts;
            opts.seed = args.common.seed;
            C1Estimate M = estimate_M(mp.g(), r_I, opts.seed, opts.budget);
            double dense = oracle::dense_c1_norm(mp.g(), r_I, oracle_sup_samples, args.common.seed);
            // The bound must dominate the dense reference; a sampled estimate
            // must also not fall short of it by more than the tolerance.
            double shortfall = dense > 0 ? (dense - M.raw) / dense : 0.0;
            bool pass = dense <= M.value * (1 + 1e-12) + 1e-300 && shortfall <= oracle_sup_tolerance;
            record(std::string("sup_norm (") + to_string(M.provenance) + ")", std::max(0.0, shortfall),
                   oracle_sup_tolerance, pass);
        }

        ojson report = report_header("oracle", in, args.common.seed);
        report["oracle"] = {{"grid", {{"d", d}, {"n", n}, {"L", small.half_width()}}}, {"checks", checks}, {"pass", all}};
        int code = all ? Success : HypothesisFailure;
        if (!all)
            for (const auto& c : checks)
                if (!c["pass"].get<bool>()) err << "oracle mismatch: " << c["name"].get<std::string>() << "\n";
        finish(report, mp.warnings, code);
        emit(report, out, args.common.out);
        return code;
    });
}

/// Full command-line entry point.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"qie: quadratic integral equation checker and solver"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    auto common = [](CLI::App* sub, CommonArgs& a) {
        sub->add_option("file", a.file, "problem file (JSON)")->required();
        sub->add_option("--seed", a.seed, "seed for randomized estimates")->default_val(0);
        sub->add_option("--out", a.out, "write the report here instead of stdout");
    };

    CommonArgs check_args;
    auto* check = app.add_subcommand("check", "validate hypotheses and compute constants");
    common(check, check_args);

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "check, then Picard-iterate to the fixed point");
    common(solve, solve_args.common);
    solve->add_option("--tol", solve_args.tol, "H2 residual tolerance")->check(CLI::PositiveNumber);
    solve->add_option("--max-iter", solve_args.max_iter, "iteration cap")->check(CLI::PositiveNumber);
    solve->add_option("--trace", solve_args.trace, "write the iteration trace CSV here");
    solve->add_flag("--best-effort", solve_args.best_effort, "iterate even when the problem is not certified");

    ContinuityArgs cont_args;
    auto* cont = app.add_subcommand("continuity", "compare solutions for two nonlinearities");
    common(cont, cont_args.common);
    cont->add_option("--g2", cont_args.g2_file, "document with the second 'g' list")->required();
    cont->add_option("--tol", cont_args.tol, "H2 residual tolerance")->check(CLI::PositiveNumber);

    OracleArgs oracle_args;
    auto* orc = app.add_subcommand("oracle", "cross-check fast paths against brute force on a small grid");
    common(orc, oracle_args.common);
    orc->add_option("--size", oracle_args.size, "points per axis of the reduced grid");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? Success : InputError;
    }

    if (check->parsed()) return cmd_check(check_args, out, err);
    if (solve->parsed()) return cmd_solve(solve_args, out, err);
    if (cont->parsed()) return cmd_continuity(cont_args, out, err);
    return cmd_oracle(oracle_args, out, err);
}

} // namespace qie::cli
