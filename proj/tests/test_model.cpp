#include "helpers.hpp"
#include "qie/model.hpp"

#include <catch_amalgamated.hpp>

using namespace qie;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;

double max_diff(const ScalarField& a, const ScalarField& b) { return sup_norm(a - b); }

} // namespace

TEST_CASE("materialize_kernel: Gaussian samples and integrals", "[model][kernel]") {
    Grid g(2, 64, 8.0);
    auto k = materialize_kernel(GaussianKernel{1.0}, g);
    CHECK(k.delta_source == DeltaSource::Symbolic);
    CHECK_THAT(l1_norm(k.K), WithinRel(pi, 1e-6));
    CHECK(k.tail_mass < default_tail_mass_threshold);

    auto e = materialize_kernel(ExpressionKernel{parse("exp(-x1^2-x2^2)", 2, VariableFamily::X)}, g);
    CHECK(max_diff(e.K, k.K) <= 1e-14);
    CHECK(max_diff(e.deltaK, k.deltaK) <= 1e-13);

    auto scaled = materialize_kernel(GaussianKernel{1.0, 0.5}, g);
    CHECK_THAT(l1_norm(scaled.K), WithinRel(pi / 2, 1e-6));
    CHECK_THROWS_AS(materialize_kernel(GaussianKernel{0.0}, g), ConfigError);
}

TEST_CASE("materialize_kernel: symbolic and spectral Laplacians agree", "[model][kernel]") {
    Grid g(2, 64, 8.0);
    auto sym = materialize_kernel(GaussianKernel{1.0}, g);
    std::vector<double> samples(sym.K.values().begin(), sym.K.values().end());
    auto tab = materialize_kernel(TabulatedKernel{samples}, g);
    CHECK(tab.delta_source == DeltaSource::Spectral);
    CHECK(l1_norm(sym.deltaK - tab.deltaK) <= 1e-6 * l1_norm(sym.deltaK));
}

TEST_CASE("materialize_kernel: trivial and invalid kernels", "[model][kernel]") {
    Grid g(2, 8, 2.0);
    CHECK_THROWS_AS(materialize_kernel(TabulatedKernel{std::vector<double>(64, 0.0)}, g), AssumptionViolation);
    CHECK_NOTHROW(materialize_kernel(TabulatedKernel{std::vector<double>(64, 0.0)}, g, true));
    CHECK_THROWS_AS(materialize_kernel(TabulatedKernel{std::vector<double>(10, 1.0)}, g), ConfigError);
    CHECK_THROWS_AS(materialize_kernel(ExpressionKernel{parse("1/x1", 2, VariableFamily::X)}, g), DomainError);
}

TEST_CASE("apply_operator", "[model][operator]") {
    Grid g(2, 32, 4.0);
    auto c = ScalarField::sample(g, [](const std::array<double, 3>&) { return 2.0; });
    CHECK(max_diff(apply_operator(InverseHelmholtz{}, c), c) <= 1e-14);

    const double k = pi / 4.0;
    auto mode = ScalarField::sample(g, [k](const std::array<double, 3>& x) { return std::cos(k * x[0]); });
    CHECK(max_diff(apply_operator(InverseHelmholtz{}, mode), (1.0 / (1.0 + k * k)) * mode) <= 1e-14);

    std::mt19937_64 rng(1);
    auto f = test::random_band_limited(g, rng);
    auto s = apply_operator(ScaledIdentity{2.5}, f);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(s[i] == 2.5 * f[i]);
}

TEST_CASE("apply_operator is linear and bounded by its norm", "[model][operator]") {
    Grid g(2, 32, 4.0);
    std::mt19937_64 rng(2);
    const std::vector<OperatorSpec> ops{InverseHelmholtz{}, ScaledIdentity{-1.5},
                                        RationalMultiplier{{1.0, 2.0}, {1.0, 0.0, 1.0}}};
    for (const auto& op : ops) {
        const double norm = operator_norm(op, g);
        for (int t = 0; t < 10; ++t) {
            auto f = test::random_band_limited(g, rng);
            auto h = test::random_band_limited(g, rng);
            const double a = -0.75;
            auto lhs = apply_operator(op, a * f + h);
            auto rhs = a * apply_operator(op, f) + apply_operator(op, h);
            CHECK(max_diff(lhs, rhs) <= 1e-12 * std::max(1.0, sup_norm(rhs)));
            CHECK(h2_norm(apply_operator(op, f)) <= norm * h2_norm(f) * (1 + 1e-12));
        }
    }
}

TEST_CASE("operator norms", "[model][operator]") {
    Grid g(2, 32, 4.0);
    CHECK(operator_norm(InverseHelmholtz{}, g) == 1.0);
    CHECK(operator_norm(ScaledIdentity{-3.5}, g) == 3.5);
    CHECK(operator_norm(RationalMultiplier{{1.0}, {1.0, 0.0, 1.0}}, g) == 1.0);
    CHECK_THROWS_AS(operator_norm(ScaledIdentity{0.0}, g), AssumptionViolation);
    CHECK_THROWS_AS(operator_norm(RationalMultiplier{{1.0}, {1.0, -1.0}}, g), ConfigError);
    CHECK_THROWS_AS(operator_norm(RationalMultiplier{{1.0}, {}}, g), ConfigError);
}

TEST_CASE("materialize_u0", "[model][u0]") {
    auto p = test::gaussian_problem(0.0025, 64, "z1^2", "exp(-x1^2-x2^2)");
    auto u0 = materialize_u0(p);
    // Closed-form Fourier-side quadrature: ||exp(-|x|^2)||_H2^2 = 9 pi / 2.
    CHECK_THAT(h2_norm_vector(u0), WithinRel(3.7599424119465007536, 1e-6));

    ProblemSpec two{Grid(2, 16, 4.0),
                    {GaussianKernel{}, GaussianKernel{}},
                    {InverseHelmholtz{}, InverseHelmholtz{}},
                    NonlinearitySpec::parse({"z1*z2", "z2"}),
                    {parse("0", 2, VariableFamily::X), parse("0", 2, VariableFamily::X)},
                    std::nullopt,
                    {}};
    CHECK_THROWS_AS(materialize_u0(two), AssumptionViolation);
    CHECK_NOTHROW(materialize_u0(two, true));
}

TEST_CASE("validate_assumptions lists every violation", "[model][validation]") {
    CHECK(validate_assumptions(test::gaussian_problem()).ok());

    auto zero_g = test::gaussian_problem(0.0025, 32, "0");
    auto r = validate_assumptions(zero_g);
    CHECK(r.has("g_vanishes_identically"));
    CHECK_FALSE(r.has("g_nonzero_at_origin"));

    auto shifted = test::gaussian_problem(0.0025, 32, "z1+1");
    CHECK(validate_assumptions(shifted).has("g_nonzero_at_origin"));

    auto p = test::gaussian_problem(0.0025, 32, "z1+1", "0");
    p.kernels[0] = TabulatedKernel{std::vector<double>(32 * 32, 0.0)};
    p.operators[0] = ScaledIdentity{0.0};
    auto all = validate_assumptions(p);
    CHECK(all.has("kernel_trivial"));
    CHECK(all.has("u0_trivial"));
    CHECK(all.has("operator_norm_invalid"));
    CHECK(all.has("g_nonzero_at_origin"));
    CHECK(all.violations.size() == 4u);

    auto bad_domain = test::gaussian_problem(0.0025, 32, "sqrt(z1)");
    CHECK(validate_assumptions(bad_domain).has("g_domain_error"));

    auto shape = test::gaussian_problem();
    shape.operators.push_back(InverseHelmholtz{});
    CHECK(validate_assumptions(shape).has("shape"));

    auto wide = test::gaussian_problem(0.0025, 32, "z1^2", "exp(-(x1^2+x2^2)/20)");
    CHECK_FALSE(validate_assumptions(wide).warnings.empty());
}

TEST_CASE("materialize collects norms and rejects degenerate data", "[model][materialize]") {
    auto mp = materialize(test::gaussian_problem());
    CHECK(mp.operator_norms == std::vector<double>{1.0});
    CHECK(mp.kernels.size() == 1u);
    CHECK(mp.warnings.empty());

    auto zero_u0 = test::gaussian_problem(0.0025, 32, "z1^2", "0");
    CHECK_THROWS_AS(materialize(zero_u0), AssumptionViolation);
    auto diag = materialize(zero_u0, true);
    CHECK(diag.u0_norm == 0.0);

    auto zero_k = test::gaussian_problem(0.0, 32);
    CHECK_THROWS_AS(materialize(zero_k), AssumptionViolation);
    CHECK_NOTHROW(materialize(zero_k, true));
}
