#include "helpers.hpp"
#include "qie/oracle.hpp"

#include <catch_amalgamated.hpp>

using namespace qie;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ScalarField discrete_delta(const Grid& g) {
    ScalarField d(g);
    d[g.flatten({g.points_per_axis() / 2, g.points_per_axis() / 2, g.points_per_axis() / 2})] = 1.0 / g.cell_volume();
    return d;
}

} // namespace

TEST_CASE("direct convolution with a discrete delta reproduces the field", "[oracle][convolution]") {
    std::mt19937_64 rng(1);
    for (const Grid& g : {Grid(2, 16, 3.0), Grid(3, 8, 2.0)}) {
        auto f = test::random_band_limited(g, rng);
        CHECK(sup_norm(oracle::direct_convolution(discrete_delta(g), f) - f) <= 1e-13);
    }
}

TEST_CASE("direct convolution is bilinear and symmetric", "[oracle][convolution]") {
    Grid g(2, 16, 3.0);
    std::mt19937_64 rng(2);
    auto a = test::random_band_limited(g, rng);
    auto b = test::random_band_limited(g, rng);
    auto c = test::random_band_limited(g, rng);
    auto ab = oracle::direct_convolution(a, b);
    CHECK(sup_norm(ab - oracle::direct_convolution(b, a)) <= 1e-12);
    auto lhs = oracle::direct_convolution(a, 2.0 * b + c);
    auto rhs = 2.0 * ab + oracle::direct_convolution(a, c);
    CHECK(sup_norm(lhs - rhs) <= 1e-12);
}

TEST_CASE("direct convolution of two Gaussians", "[oracle][convolution]") {
    // exp(-|x|^2) * exp(-|x|^2) = (pi / 2) exp(-|x|^2 / 2) in the plane.
    Grid g(2, 16, 4.0);
    auto e = test::gaussian_field(g);
    auto conv = oracle::direct_convolution(e, e);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto x = g.point(i);
        if (x[0] * x[0] + x[1] * x[1] > 1.0) continue;
        CHECK_THAT(conv[i], WithinAbs(std::numbers::pi / 2 * std::exp(-(x[0] * x[0] + x[1] * x[1]) / 2), 1e-6));
    }
}

TEST_CASE("direct multiplier", "[oracle][multiplier]") {
    Grid g(2, 16, 4.0);
    std::mt19937_64 rng(3);
    auto f = test::random_band_limited(g, rng);
    CHECK(sup_norm(oracle::direct_multiplier(f, [](double) { return 1.0; }) - f) <= 1e-12);
    auto helm = oracle::direct_multiplier(f, [](double s) { return 1.0 / (1.0 + s); });
    CHECK(sup_norm(helm - apply_operator(InverseHelmholtz{}, f)) <= 1e-12);

    const double k = std::numbers::pi / 2;
    auto mode = ScalarField::sample(g, [k](const std::array<double, 3>& x) { return std::cos(k * x[1]); });
    auto scaled = oracle::direct_multiplier(mode, [](double s) { return s; });
    CHECK(sup_norm(scaled - k * k * mode) <= 1e-12);
}

TEST_CASE("the oracle budget refuses large grids", "[oracle][budget]") {
    Grid big2(2, 32, 4.0), big3(3, 16, 4.0);
    ScalarField a(big2), b(big3);
    CHECK_THROWS_AS(oracle::direct_convolution(a, a), ConfigError);
    CHECK_THROWS_AS(oracle::direct_convolution(b, b), ConfigError);
    CHECK_THROWS_AS(oracle::direct_multiplier(a, [](double) { return 1.0; }), ConfigError);
    CHECK_NOTHROW(oracle::direct_convolution(a, a, oracle::OracleBudget{32, 8}));
    auto mp = materialize(test::gaussian_problem(0.0025, 32));
    CHECK_THROWS_AS(oracle::direct_map_tg(mp, VectorField::zeros(mp.grid(), 1)), ConfigError);
}

TEST_CASE("finite-difference gradient", "[oracle][gradient]") {
    auto g = NonlinearitySpec::parse({"z1^2*z2", "sin(z1)+z2^3"});
    const std::vector<double> z{0.7, -1.3};
    auto J = oracle::finite_diff_gradient(g, z);
    CHECK_THAT(J[0][0], WithinAbs(2 * 0.7 * -1.3, 1e-8));
    CHECK_THAT(J[0][1], WithinAbs(0.49, 1e-8));
    CHECK_THAT(J[1][0], WithinAbs(std::cos(0.7), 1e-8));
    CHECK_THAT(J[1][1], WithinAbs(3 * 1.69, 1e-8));
}

TEST_CASE("uniform ball points", "[oracle][sampling]") {
    auto pts = oracle::uniform_ball_points(2, 1.5, 20000, 4);
    REQUIRE(pts.size() == 20000u);
    double mean_r = 0;
    for (const auto& p : pts) {
        const double r = std::hypot(p[0], p[1]);
        CHECK(r <= 1.5);
        mean_r += r / pts.size();
    }
    // E|z| = 2r/3 for the uniform disc.
    CHECK_THAT(mean_r, WithinRel(1.0, 0.01));
    CHECK(oracle::uniform_ball_points(3, 1.0, 5, 9) == oracle::uniform_ball_points(3, 1.0, 5, 9));
    CHECK(oracle::uniform_ball_points(3, 1.0, 5, 9) != oracle::uniform_ball_points(3, 1.0, 5, 10));
}

TEST_CASE("dense sup and C1 estimates", "[oracle][sampling]") {
    CHECK(oracle::dense_sup_estimate(parse("z1", 1, VariableFamily::Z), 1, 3.0, 1000000) >= 2.97);
    const double s = oracle::dense_sup_estimate(parse("z1^2+z2^2", 2, VariableFamily::Z), 2, 1.0, 1000000);
    CHECK(s >= 0.99);
    CHECK(s <= 1.0);
    // |z1| <= r and |d/dz1| = 1.
    CHECK_THAT(oracle::dense_c1_norm(NonlinearitySpec::parse({"z1"}), 2.0, 100000), WithinRel(3.0, 1e-4));
}
