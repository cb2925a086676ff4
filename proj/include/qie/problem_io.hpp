#pragma once

// JSON problem files.
//
//   {
//     "grid":       {"d": 2, "n": 64, "L": 8.0},
//     "components": 1,
//     "kernels":    ["exp(-x1^2-x2^2)" | {"name": "gaussian", "alpha": 1, "amplitude": 1}
//                    | {"name": "expression", "expr": "..."} | {"name": "tabulated", "values": [...]}],
//     "operators":  ["inverse_helmholtz" | {"name": "scaled_identity", "alpha": 2.5}
//                    | {"name": "rational_multiplier", "p": [...], "q": [...]}],
//     "u0":         ["0.2*exp(-x1^2-x2^2)" | [tabulated samples...]],
//     "g":          ["z1^2"],
//     "rho":        1.0,                       (optional)
//     "constants":  {"c_e": ..., "c_a": ...}   (optional, expert use)
//   }

#include "qie/error.hpp"
#include "qie/expr.hpp"
#include "qie/model.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace qie {

using json = nlohmann::json;

namespace detail {

inline const json& require_key(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
    return j.at(key);
}

inline double require_number(const json& j, const char* key, const std::string& where) {
    const json& v = require_key(j, key, where);
    if (!v.is_number()) throw ConfigError(where + ": field '" + key + "' must be a number");
    return v.get<double>();
}

inline std::vector<double> number_array(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw ConfigError(where + ": expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items())
        if (!ok.count(k)) throw ConfigError(where + ": unknown field '" + k + "'");
}

inline KernelSpec parse_kernel(const json& j, int d, const std::string& where) {
    if (j.is_string()) return ExpressionKernel{parse(j.get<std::string>(), d, VariableFamily::X)};
    if (!j.is_object()) throw ConfigError(where + ": kernel must be a string or an object");
    const auto& name = require_key(j, "name", where);
    if (!name.is_string()) throw ConfigError(where + ": 'name' must be a string");
    const auto n = name.get<std::string>();
    if (n == "gaussian") {
        reject_unknown_keys(j, {"name", "alpha", "amplitude"}, where);
        GaussianKernel g;
        g.alpha = require_number(j, "alpha", where);
        if (j.contains("amplitude")) g.amplitude = require_number(j, "amplitude", where);
        return g;
    }
    if (n == "expression") {
        reject_unknown_keys(j, {"name", "expr"}, where);
        const auto& e = require_key(j, "expr", where);
        if (!e.is_string()) throw ConfigError(where + ": 'expr' must be a string");
        return ExpressionKernel{parse(e.get<std::string>(), d, VariableFamily::X)};
    }
    if (n == "tabulated") {
        reject_unknown_keys(j, {"name", "values"}, where);
        return TabulatedKernel{number_array(require_key(j, "values", where), where)};
    }
    throw ConfigError(where + ": unknown kernel '" + n + "'");
}

inline OperatorSpec parse_operator(const json& j, const std::string& where) {
    std::string n;
    if (j.is_string()) {
        n = j.get<std::string>();
    } else if (j.is_object()) {
        const auto& name = require_key(j, "name", where);
        if (!name.is_string()) throw ConfigError(where + ": 'name' must be a string");
        n = name.get<std::string>();
    } else {
        throw ConfigError(where + ": operator must be a string or an object");
    }
    if (n == "inverse_helmholtz") {
        if (j.is_object()) reject_unknown_keys(j, {"name"}, where);
        return InverseHelmholtz{};
    }
    if (n == "scaled_identity") {
        if (!j.is_object()) throw ConfigError(where + ": scaled_identity needs 'alpha'");
        reject_unknown_keys(j, {"name", "alpha"}, where);
        return ScaledIdentity{require_number(j, "alpha", where)};
    }
    if (n == "rational_multiplier") {
        if (!j.is_object()) throw ConfigError(where + ": rational_multiplier needs 'p' and 'q'");
        reject_unknown_keys(j, {"name", "p", "q"}, where);
        return RationalMultiplier{number_array(require_key(j, "p", where), where + ".p"),
                                  number_array(require_key(j, "q", where), where + ".q")};
    }
    throw ConfigError(where + ": unknown operator '" + n + "'");
}

inline std::vector<std::string> string_array(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array of strings");
    std::vector<std::string> out;
    for (const auto& v : j) {
        if (!v.is_string()) throw ConfigError(where + ": expected an array of strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

} // namespace detail

inline json parse_json_text(const std::string& text, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(where + ": malformed JSON: " + e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

/// Parses g expressions from a JSON array of strings (arity = array length).
inline NonlinearitySpec parse_nonlinearity(const json& j, const std::string& where = "g") {
    return NonlinearitySpec::parse(detail::string_array(j, where));
}

/// Builds a ProblemSpec from a parsed problem document. Throws ConfigError or
/// ParseError on any malformed input.
inline ProblemSpec problem_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("problem: top level must be an object");
    detail::reject_unknown_keys(j, {"grid", "components", "kernels", "operators", "u0", "g", "rho", "constants"},
                                "problem");

    const json& jg = detail::require_key(j, "grid", "problem");
    detail::reject_unknown_keys(jg, {"d", "n", "L"}, "grid");
    const auto& jd = detail::require_key(jg, "d", "grid");
    const auto& jn = detail::require_key(jg, "n", "grid");
    if (!jd.is_number_integer() || !jn.is_number_integer()) throw ConfigError("grid: 'd' and 'n' must be integers");
    Grid grid(jd.get<int>(), jn.get<int>(), detail::require_number(jg, "L", "grid"));

    const auto& jN = detail::require_key(j, "components", "problem");
    if (!jN.is_number_integer()) throw ConfigError("problem: 'components' must be an integer");
    const int N = jN.get<int>();
    if (N < 1 || N > max_arity) throw ConfigError("problem: 'components' must be in [1, 16]");

    auto list = [&](const char* key) -> const json& {
        const json& v = detail::require_key(j, key, "problem");
        if (!v.is_array() || static_cast<int>(v.size()) != N)
            throw ConfigError(std::string("problem: '") + key + "' must be a list of " + std::to_string(N) + " entries");
        return v;
    };

    std::vector<KernelSpec> kernels;
    const json& jk = list("kernels");
    for (std::size_t m = 0; m < jk.size(); ++m)
        kernels.push_back(detail::parse_kernel(jk[m], grid.dim(), "kernels[" + std::to_string(m) + "]"));

    std::vector<OperatorSpec> operators;
    const json& jo = list("operators");
    for (std::size_t m = 0; m < jo.size(); ++m)
        operators.push_back(detail::parse_operator(jo[m], "operators[" + std::to_string(m) + "]"));

    std::vector<FieldSpec> u0;
    const json& ju = list("u0");
    for (std::size_t m = 0; m < ju.size(); ++m) {
        const std::string where = "u0[" + std::to_string(m) + "]";
        if (ju[m].is_string()) u0.emplace_back(parse(ju[m].get<std::string>(), grid.dim(), VariableFamily::X));
        else u0.emplace_back(detail::number_array(ju[m], where));
    }

    list("g");
    NonlinearitySpec g = parse_nonlinearity(j.at("g"));

    std::optional<double> rho;
    if (j.contains("rho")) {
        rho = detail::require_number(j, "rho", "problem");
        if (!(*rho > 0.0 && *rho <= 1.0)) throw ConfigError("problem: rho must lie in (0, 1]");
    }

    ConstantOverrides overrides;
    if (j.contains("constants")) {
        const json& jc = j.at("constants");
        if (!jc.is_object()) throw ConfigError("constants: must be an object");
        detail::reject_unknown_keys(jc, {"c_e", "c_a"}, "constants");
        if (jc.contains("c_e")) overrides.c_e = detail::require_number(jc, "c_e", "constants");
        if (jc.contains("c_a")) overrides.c_a = detail::require_number(jc, "c_a", "constants");
        for (auto c : {overrides.c_e, overrides.c_a})
            if (c && !(*c > 0)) throw ConfigError("constants: overrides must be positive");
    }

    ProblemSpec p{grid, std::move(kernels), std::move(operators), std::move(g), std::move(u0), rho, overrides};
    p.check_shape();
    return p;
}

} // namespace qie
