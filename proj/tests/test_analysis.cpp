#include "helpers.hpp"
#include "qie/analysis.hpp"
#include "qie/oracle.hpp"

#include <catch_amalgamated.hpp>

using namespace qie;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

NonlinearitySpec G(std::initializer_list<std::string> texts) { return NonlinearitySpec::parse(texts); }

} // namespace

TEST_CASE("embedding constant", "[analysis][constants]") {
    // References: pi/4 radial integral in d = 2, high-precision quadrature in d = 3.
    const double ce2 = 0.35355339059327376220, ce3 = 0.23721249916439717268;
    CHECK_THAT(embedding_constant(2), WithinRel(ce2, 1e-12));
    CHECK_THAT(embedding_constant(3), WithinRel(ce3, 1e-12));
    CHECK(embedding_constant(2) >= ce2);
    CHECK(embedding_constant(3) >= ce3);
    CHECK_THAT(radial_weight_integral(2), WithinRel(std::numbers::pi / 4, 1e-12));
    CHECK_THROWS_AS(embedding_constant(4), ConfigError);
    CHECK_THROWS_AS(algebra_constant(1), ConfigError);
}

TEST_CASE("algebra constant", "[analysis][constants]") {
    CHECK_THAT(algebra_constant(2), WithinRel(2.0, 1e-12));
    CHECK_THAT(algebra_constant(3), WithinRel(1.3418765339308278324, 1e-12));
    CHECK_THAT(algebra_constant(2), WithinRel(4 * std::sqrt(2.0) * embedding_constant(2), 1e-15));
}

TEST_CASE("randomized falsification of the embedding and algebra inequalities", "[analysis][constants]") {
    std::mt19937_64 rng(17);
    for (int d : {2, 3}) {
        Grid g = d == 2 ? Grid(2, 32, 5.0) : Grid(3, 16, 4.0);
        const double ce = embedding_constant(d), ca = algebra_constant(d);
        int violations = 0;
        for (int t = 0; t < 200; ++t) {
            auto f = test::random_band_limited(g, rng, 4, 3);
            auto h = test::random_band_limited(g, rng, 4, 3);
            if (sup_norm(f) > ce * h2_norm(f)) ++violations;
            if (h2_norm(f * h) > ca * h2_norm(f) * h2_norm(h)) ++violations;
        }
        CHECK(violations == 0);
    }
}

TEST_CASE("algebra inequality on constants and Gaussians", "[analysis][constants]") {
    Grid g(2, 32, 10.0);
    auto one = ScalarField::sample(g, [](const std::array<double, 3>&) { return 1.0; });
    const double ratio_const = h2_norm(one * one) / (h2_norm(one) * h2_norm(one));
    CHECK_THAT(ratio_const, WithinRel(1.0 / 20.0, 1e-12));
    CHECK(ratio_const <= algebra_constant(2));

    Grid fine(2, 64, 8.0);
    auto a = test::gaussian_field(fine, 1.0, 1.0);
    auto b = test::gaussian_field(fine, 0.5, 2.0, 0.3);
    CHECK(h2_norm(a * b) < algebra_constant(2) * h2_norm(a) * h2_norm(b));
}

TEST_CASE("ball radius", "[analysis]") {
    CHECK(ball_radius_I(0.5, 1.0) == 1.0);
    CHECK(ball_radius_I(0.3, 0.0) == 0.3);
}

TEST_CASE("estimate_M: rigorous polynomial bounds", "[analysis][M]") {
    const double R = 1.7;
    auto lin = estimate_M(G({"z1"}), R);
    CHECK(lin.provenance == Provenance::RigorousBound);
    CHECK_THAT(lin.value, WithinRel(R + 1, 1e-15));
    CHECK_THAT(estimate_M(G({"z1^2"}), R).value, WithinRel(R * R + 2 * R, 1e-15));
    // Two components: |z1 z2| + |z2| + |z2| + |z1| + 1 bounded termwise.
    CHECK_THAT(estimate_M(G({"z1*z2", "z2"}), 2.0).value, WithinRel(4.0 + 2.0 + 2.0 + 0.0 + 1.0 + 2.0, 1e-15));
}

TEST_CASE("estimate_M: sampled estimates against the dense oracle", "[analysis][M]") {
    auto s = estimate_M(G({"sin(z1)"}), 2.0);
    CHECK(s.provenance == Provenance::SampledEstimate);
    CHECK_THAT(s.value, WithinRel(1.1 * s.raw, 1e-15));
    const double dense = oracle::dense_c1_norm(G({"sin(z1)"}), 2.0, 1000000, 1);
    CHECK_THAT(s.raw, WithinRel(dense, 0.02));
    // sup |sin| = sup |cos| = 1 on [-2, 2].
    CHECK_THAT(s.raw, WithinRel(2.0, 1e-6));

    auto two = estimate_M(G({"tanh(z1*z2)", "sin(z1)*z2"}), 0.8);
    const double dense2 = oracle::dense_c1_norm(G({"tanh(z1*z2)", "sin(z1)*z2"}), 0.8, 200000, 2);
    CHECK_THAT(two.raw, WithinRel(dense2, 0.02));
    CHECK(two.raw >= dense2 * (1 - 1e-3));
}

TEST_CASE("estimate_M is reproducible for a fixed seed", "[analysis][M]") {
    auto g = G({"sin(z1)*exp(z2)", "tanh(z2)"});
    CHECK(estimate_M(g, 1.2, 5).raw == estimate_M(g, 1.2, 5).raw);
}

TEST_CASE("c1_distance", "[analysis][distance]") {
    CHECK(c1_distance(G({"z1^2"}), G({"z1^2"}), 1.0).value == 0.0);
    const double R = 1.3, eps = 0.01;
    CHECK_THAT(c1_distance(G({"z1"}), G({"1.01*z1"}), R).value, WithinRel(eps * (R + 1), 1e-12));

    auto d = c1_distance(G({"sin(z1)"}), G({"z1"}), 0.5);
    CHECK(d.provenance == Provenance::SampledEstimate);
    // (0.5 - sin 0.5) + (1 - cos 0.5)
    CHECK_THAT(d.raw, WithinRel(0.5 - std::sin(0.5) + 1 - std::cos(0.5), 0.02));
    const double dense = oracle::dense_c1_norm(G({"sin(z1)"}) - G({"z1"}), 0.5, 1000000, 3);
    CHECK_THAT(d.raw, WithinRel(dense, 0.02));
}

TEST_CASE("compute_Q and compute_sigma", "[analysis]") {
    CHECK(compute_Q({1.0}, {2.5}) == 2.5);
    CHECK_THAT(compute_Q({1.0, 1.0}, {2.5, 2.5}), WithinRel(std::sqrt(2.0) * 2.5, 1e-15));
    CHECK_THROWS_AS(compute_Q({1.0}, {1.0, 2.0}), ConfigError);
    CHECK_THAT(compute_sigma(1.0, 0.1, 1.0, 0.0), WithinRel(0.2, 1e-15));
    CHECK_THROWS_AS(compute_sigma(1.0, 0.0, 1.0, 0.0), ConfigError);
}

TEST_CASE("check_theorem13 verdicts", "[analysis][theorem13]") {
    auto pass = check_theorem13(1.0, 0.3, 0.0, 1.0, 1.0);
    CHECK(pass.pass);
    CHECK_THAT(pass.lhs, WithinRel(0.3, 1e-15));
    CHECK_THAT(pass.sigma, WithinRel(0.6, 1e-15));
    CHECK(pass.feasible);
    CHECK_THAT(pass.feasible_lo, WithinRel(0.6, 1e-15));

    auto fail = check_theorem13(1.0, 0.6, 0.0, 1.0, 1.0);
    CHECK_FALSE(fail.pass);
    CHECK_FALSE(fail.feasible);

    auto edge = check_theorem13(1.0, 0.125, 1.0, 1.0, 1.0);
    CHECK(edge.pass);
    CHECK(edge.boundary_equality);
    CHECK(edge.warnings.size() == 1u);
    CHECK_THAT(edge.sigma, WithinRel(0.5, 1e-15));

    // lhs = rho/2 with ||u0|| = 0 gives sigma = 1: no strict contraction.
    auto degenerate = check_theorem13(1.0, 0.5, 0.0, 1.0, 1.0);
    CHECK_FALSE(degenerate.pass);
    CHECK(degenerate.boundary_equality);

    CHECK_THROWS_AS(check_theorem13(1.0, 0.1, 0.0, 1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(check_theorem13(1.0, 0.1, 0.0, 1.0, 1.5), ConfigError);

    // Every pass implies sigma <= rho / (||u0|| + 1).
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        const double ca = 0.1 + ud(rng), M = ud(rng), u = 2 * ud(rng), Q = ud(rng), rho = 0.05 + 0.95 * ud(rng);
        auto v = check_theorem13(ca, M, u, Q, rho);
        if (v.pass) {
            CHECK(v.sigma <= rho / (u + 1) * (1 + 1e-14));
            CHECK(v.sigma < 1.0);
        }
    }
}

TEST_CASE("analyze: the certified Gaussian problem", "[analysis][report]") {
    auto mp = materialize(test::gaussian_problem());
    auto r = analyze(mp);
    CHECK(r.theorem13.pass);
    CHECK(r.sigma < 1.0);
    CHECK(r.M_provenance == Provenance::RigorousBound);
    CHECK_FALSE(r.non_certified_constants);
    CHECK_THAT(r.r_I, WithinRel(r.c_e * (r.u0_norm + 1), 1e-12));
    CHECK_THAT(r.sigma, WithinRel(2 * r.c_a * r.Q * r.M * (r.u0_norm + 1), 1e-12));
    CHECK_THAT(r.Q, WithinRel(r.kernel_w21[0], 1e-15));
    CHECK_THAT(r.kernel_w21[0], WithinRel(std::hypot(r.kernel_l1[0], r.kernel_delta_l1[0]), 1e-15));
    // 0.0025 * sqrt(pi^2 + (8 pi / e)^2); the grid L1 norm of |Laplacian K| is second order in h.
    CHECK_THAT(r.Q, WithinRel(0.0025 * 9.7649766846927596769, 5e-3));
    // u0 = 0.2 exp(-|x|^2): ||u0||^2 = 0.04 * 9 pi / 2
    CHECK_THAT(r.u0_norm, WithinRel(0.2 * 3.7599424119465007536, 1e-6));
    CHECK_THAT(r.M, WithinRel(r.r_I * r.r_I + 2 * r.r_I, 1e-14));
    CHECK(r.theorem13.lhs <= 0.25);
    CHECK(r.discrete_embedding_constant <= r.c_e);
}

TEST_CASE("analyze: overrides and sampled provenance are stamped", "[analysis][report]") {
    auto p = test::gaussian_problem(0.0025, 32, "sin(z1)");
    p.constants.c_e = 0.3;
    auto r = analyze(materialize(p));
    CHECK(r.non_certified_constants);
    CHECK(r.c_e == 0.3);
    CHECK(r.c_e_provenance == Provenance::Override);
    CHECK(r.c_a_provenance == Provenance::RigorousBound);
    CHECK(r.M_provenance == Provenance::SampledEstimate);
    CHECK(r.warnings.size() == 2u);
}

TEST_CASE("mean-value and Lipschitz bounds hold with the computed M", "[analysis][M]") {
    std::mt19937_64 rng(12);
    for (const auto& g : {G({"z1^2"}), G({"sin(z1)*z2", "z1*z2"}), G({"tanh(z1)+z2^3", "exp(z1)-1"})}) {
        const double r = 0.9;
        const double M = estimate_M(g, r).value;
        auto pts = oracle::uniform_ball_points(g.arity(), r, 2000, rng());
        int violations = 0;
        for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
            const auto& a = pts[i];
            const auto& b = pts[i + 1];
            double na = 0, dab = 0, ga = 0, gab = 0;
            for (std::size_t k = 0; k < a.size(); ++k) {
                na += a[k] * a[k];
                dab += (a[k] - b[k]) * (a[k] - b[k]);
            }
            for (int m = 0; m < g.arity(); ++m) {
                double va = evaluate(g.component(m), a), vb = evaluate(g.component(m), b);
                ga = std::max(ga, std::abs(va));
                gab = std::max(gab, std::abs(va - vb));
            }
            if (ga > M * std::sqrt(na) * (1 + 1e-12)) ++violations;
            if (gab > M * std::sqrt(dab) * (1 + 1e-12)) ++violations;
        }
        CHECK(violations == 0);
    }
}

TEST_CASE("continuity bound forms agree", "[analysis][continuity]") {
    CHECK(continuity_bound(0.5, 1.0, 0.0, 0.0) == 0.0);
    CHECK_THAT(continuity_bound(0.5, 1.0, 0.0, 0.1), WithinRel(0.05, 1e-15));
    CHECK_THROWS_AS(continuity_bound(1.0, 1.0, 0.0, 0.1), ConfigError);

    auto r = analyze(materialize(test::gaussian_problem()));
    const double dist = 0.0137;
    CHECK_THAT(continuity_bound(r, dist),
               WithinRel(continuity_bound_direct(r.c_a, r.Q, r.sigma, r.u0_norm, dist), 1e-12));
}

TEST_CASE("dense sup oracle converges to the boundary maximum", "[analysis][oracle]") {
    CHECK(oracle::dense_sup_estimate(Expr::constant(2.0), 1, 1.0, 10) == 2.0);
    CHECK(oracle::dense_sup_estimate(parse("z1", 1, VariableFamily::Z), 1, 3.0, 1000000) >= 2.97);
    CHECK(oracle::dense_sup_estimate(parse("z1^2+z2^2", 2, VariableFamily::Z), 2, 1.0, 1000000) >= 0.99);
}
