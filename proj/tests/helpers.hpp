#pragma once

#include "qie/analysis.hpp"
#include "qie/model.hpp"
#include "qie/solver.hpp"
#include "qie/spectral.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace qie::test {

/// Sum of `modes` random cosines with lattice wavevectors |k_a| <= kmax.
inline ScalarField random_band_limited(const Grid& g, std::mt19937_64& rng, int modes = 6, int kmax = 4,
                                       double amplitude = 1.0) {
    std::uniform_int_distribution<int> kd(-kmax, kmax);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    std::vector<std::array<double, 4>> terms;
    for (int j = 0; j < modes; ++j) {
        std::array<double, 4> t{};
        for (int a = 0; a < g.dim(); ++a) t[static_cast<std::size_t>(a)] = std::numbers::pi * kd(rng) / g.half_width();
        t[3] = std::numbers::pi * ud(rng);
        terms.push_back(t);
    }
    std::vector<double> amps;
    for (int j = 0; j < modes; ++j) amps.push_back(amplitude * ud(rng));
    return ScalarField::sample(g, [&](const std::array<double, 3>& x) {
        double s = 0;
        for (std::size_t j = 0; j < terms.size(); ++j) {
            double ph = terms[j][3];
            for (int a = 0; a < g.dim(); ++a) ph += terms[j][static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
            s += amps[j] * std::cos(ph);
        }
        return s;
    });
}

inline ScalarField gaussian_field(const Grid& g, double a = 1.0, double alpha = 1.0, double shift = 0.0) {
    return ScalarField::sample(g, [&](const std::array<double, 3>& x) {
        double r2 = (x[0] - shift) * (x[0] - shift);
        for (int i = 1; i < g.dim(); ++i) r2 += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        return a * std::exp(-alpha * r2);
    });
}

/// One-component problem on [-8, 8)^2: u0 = 0.2 exp(-|x|^2), g = z1^2,
/// T = (1 - Delta)^-1, K = amplitude * exp(-|x|^2).
inline ProblemSpec gaussian_problem(double amplitude = 0.0025, int n = 64, const std::string& g = "z1^2",
                                    const std::string& u0 = "0.2*exp(-x1^2-x2^2)") {
    Grid grid(2, n, 8.0);
    return ProblemSpec{grid,
                       {GaussianKernel{1.0, amplitude}},
                       {InverseHelmholtz{}},
                       NonlinearitySpec::parse({g}),
                       {parse(u0, 2, VariableFamily::X)},
                       std::nullopt,
                       {}};
}

/// Uniform random point of the H2 ball of radius r: random band-limited
/// direction normalized, radius r * U^(1/2).
inline VectorField random_ball_point(const Grid& g, int N, double r, std::mt19937_64& rng, bool on_sphere = false) {
    std::vector<ScalarField> comps;
    for (int m = 0; m < N; ++m) comps.push_back(random_band_limited(g, rng, 5, 3));
    VectorField v(std::move(comps));
    double norm = h2_norm_vector(v);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    double radius = on_sphere ? r : r * std::sqrt(ud(rng));
    return (radius / norm) * v;
}

} // namespace qie::test
