#pragma once

// Brute-force references for the fast paths. Nothing here calls the FFT,
// the symbolic differentiator or the quasi-random sampler; small grids only.

#include "qie/error.hpp"
#include "qie/expr.hpp"
#include "qie/model.hpp"
#include "qie/spectral.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace qie::oracle {

struct OracleBudget {
    int max_n_2d = 16;
    int max_n_3d = 8;

    bool allows(const Grid& g) const noexcept {
        return g.points_per_axis() <= (g.dim() == 2 ? max_n_2d : max_n_3d);
    }
    void require(const Grid& g) const {
        if (!allows(g))
            throw ConfigError("oracle budget exceeded: n = " + std::to_string(g.points_per_axis()) + " > " +
                              std::to_string(g.dim() == 2 ? max_n_2d : max_n_3d) + " for d = " +
                              std::to_string(g.dim()));
    }
};

/// h^d * sum_y K(x - y) f(y), the difference wrapped periodically onto the grid.
inline ScalarField direct_convolution(const ScalarField& K, const ScalarField& f, const OracleBudget& budget = {}) {
    K.require_same_grid(f);
    const Grid& g = K.grid();
    budget.require(g);
    const int n = g.points_per_axis();
    const int d = g.dim();
    const double w = g.cell_volume();
    ScalarField out(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto xi = g.unflatten(i);
        double s = 0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            auto yj = g.unflatten(j);
            // x_i - y_j = (i - j) h = coordinate of index (i - j + n/2) mod n.
            std::array<int, 3> k{0, 0, 0};
            for (int a = 0; a < d; ++a) k[a] = ((xi[a] - yj[a] + n / 2) % n + n) % n;
            s += K[g.flatten(k)] * f[j];
        }
        out[i] = w * s;
    }
    return out;
}

/// Applies m(|xi|^2) through explicit continuous-convention Fourier sums
/// F(xi) = h^d sum_x f(x) e^{-i xi.x}, f(x) = (2L)^-d sum_xi m F(xi) e^{i xi.x}.
inline ScalarField direct_multiplier(const ScalarField& f, const std::function<double(double)>& m,
                                     const OracleBudget& budget = {}) {
    const Grid& g = f.grid();
    budget.require(g);
    const int d = g.dim();
    const int n = g.points_per_axis();
    const double L = g.half_width();
    std::vector<std::array<double, 3>> xs(g.size()), ks(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        xs[i] = g.point(i);
        auto idx = g.unflatten(i);
        for (int a = 0; a < 3; ++a) ks[i][a] = 0;
        for (int a = 0; a < d; ++a) {
            int k = idx[a] < n / 2 ? idx[a] : idx[a] - n;
            ks[i][a] = std::numbers::pi * k / L;
        }
    }
    std::vector<std::complex<double>> F(g.size());
    for (std::size_t q = 0; q < g.size(); ++q) {
        std::complex<double> s = 0;
        double xi2 = 0;
        for (int a = 0; a < d; ++a) xi2 += ks[q][a] * ks[q][a];
        for (std::size_t i = 0; i < g.size(); ++i) {
            double phase = 0;
            for (int a = 0; a < d; ++a) phase += ks[q][a] * xs[i][a];
            s += f[i] * std::polar(1.0, -phase);
        }
        F[q] = s * g.cell_volume() * m(xi2);
    }
    ScalarField out(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::complex<double> s = 0;
        for (std::size_t q = 0; q < g.size(); ++q) {
            double phase = 0;
            for (int a = 0; a < d; ++a) phase += ks[q][a] * xs[i][a];
            s += F[q] * std::polar(1.0, phase);
        }
        out[i] = s.real() / g.volume();
    }
    return out;
}

/// Reference t_g(v) built from direct_convolution and direct_multiplier.
inline VectorField direct_map_tg(const MaterializedProblem& mp, const VectorField& v, const OracleBudget& budget = {}) {
    const Grid& g = mp.grid();
    budget.require(g);
    const std::size_t N = v.count();
    VectorField w = mp.u0 + v;
    std::vector<ScalarField> out;
    for (std::size_t m = 0; m < N; ++m) {
        ScalarField G(g);
        std::vector<double> z(N);
        for (std::size_t i = 0; i < g.size(); ++i) {
            for (std::size_t c = 0; c < N; ++c) z[c] = w[c][i];
            G[i] = evaluate(mp.g().component(static_cast<int>(m)), z);
        }
        ScalarField conv = direct_convolution(mp.kernels[m].K, G, budget);
        const auto& op = mp.spec.operators[m];
        ScalarField Tw = direct_multiplier(w[m], [&op](double s) { return multiplier_value(op, s); }, budget);
        ScalarField r(g);
        for (std::size_t i = 0; i < g.size(); ++i) r[i] = Tw[i] * conv[i];
        out.push_back(std::move(r));
    }
    return VectorField(std::move(out));
}

/// Central differences, step 1e-5 * max(1, |z|). Entry (m, n) is d g_m / d z_n.
inline std::vector<std::vector<double>> finite_diff_gradient(const NonlinearitySpec& g, const std::vector<double>& z) {
    const int N = g.arity();
    double norm = 0;
    for (double c : z) norm += c * c;
    const double h = 1e-5 * std::max(1.0, std::sqrt(norm));
    std::vector<std::vector<double>> J(static_cast<std::size_t>(N), std::vector<double>(static_cast<std::size_t>(N)));
    for (int n = 0; n < N; ++n) {
        auto zp = z, zm = z;
        zp[static_cast<std::size_t>(n)] += h;
        zm[static_cast<std::size_t>(n)] -= h;
        for (int m = 0; m < N; ++m)
            J[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)] =
                (evaluate(g.component(m), zp) - evaluate(g.component(m), zm)) / (2 * h);
    }
    return J;
}

/// `samples` pseudo-random points uniformly distributed in the ball |z| <= r of R^nvars.
inline std::vector<std::vector<double>> uniform_ball_points(int nvars, double r, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::vector<double>> pts;
    pts.reserve(static_cast<std::size_t>(samples));
    for (int s = 0; s < samples; ++s) {
        std::vector<double> z(static_cast<std::size_t>(nvars));
        double n2 = 0;
        do {
            n2 = 0;
            for (double& c : z) {
                c = normal(rng);
                n2 += c * c;
            }
        } while (n2 == 0);
        double radius = r * std::pow(unif(rng), 1.0 / nvars) / std::sqrt(n2);
        for (double& c : z) c *= radius;
        pts.push_back(std::move(z));
    }
    return pts;
}

/// max |e| over `samples` random points of the ball of radius r.
inline double dense_sup_estimate(const Expr& e, int nvars, double r, int samples, std::uint64_t seed = 0) {
    double sup = 0;
    for (const auto& z : uniform_ball_points(nvars, r, samples, seed)) sup = std::max(sup, std::abs(evaluate(e, z)));
    return sup;
}

/// Dense-sampling reference for ||g||_{C1(I)}: sups of every g_m and of every
/// finite-difference gradient entry, summed.
inline double dense_c1_norm(const NonlinearitySpec& g, double r, int samples, std::uint64_t seed = 0) {
    const auto N = static_cast<std::size_t>(g.arity());
    std::vector<double> sup_g(N, 0.0), sup_dg(N * N, 0.0);
    for (const auto& z : uniform_ball_points(g.arity(), r, samples, seed)) {
        auto J = finite_diff_gradient(g, z);
        for (std::size_t m = 0; m < N; ++m) {
            sup_g[m] = std::max(sup_g[m], std::abs(evaluate(g.component(static_cast<int>(m)), z)));
            for (std::size_t n = 0; n < N; ++n) sup_dg[m * N + n] = std::max(sup_dg[m * N + n], std::abs(J[m][n]));
        }
    }
    double total = 0;
    for (double s : sup_g) total += s;
    for (double s : sup_dg) total += s;
    return total;
}

} // namespace qie::oracle
