#pragma once

// Explicit constants for H2(R^d), d = 2, 3, with the norm
// ||phi||^2 = ||phi||_L2^2 + ||Delta phi||_L2^2 = (2 pi)^-d int (1+|xi|^4) |phi^(xi)|^2 dxi.
//
// Embedding. With w(xi) = (1+|xi|^4)^(1/2) and J = int w^-2 dxi,
//   |phi(x)| <= (2 pi)^-d int |phi^| <= (2 pi)^-d J^(1/2) ||w phi^||_L2
//            = (2 pi)^(-d/2) J^(1/2) ||phi||_H2,
// so c_e = (2 pi)^(-d/2) J^(1/2).
//
// Algebra. |xi|^4 <= (|eta| + |xi-eta|)^4 <= 8 (|eta|^4 + |xi-eta|^4) gives
// 1+|xi|^4 <= 8 (1+|eta|^4) + 8 (1+|xi-eta|^4), hence
// w(xi) <= sqrt(8) (w(eta) + w(xi-eta)). Writing (phi psi)^ = (2 pi)^-d phi^ * psi^,
//   w |(phi psi)^| <= (2 pi)^-d sqrt(8) ( (w|phi^|) * |psi^| + |phi^| * (w|psi^|) ).
// Young (L2 x L1) and ||psi^||_L1 <= J^(1/2) ||w psi^||_L2 = J^(1/2) (2 pi)^(d/2) ||psi||_H2 give
//   ||phi psi||_H2 <= 2 sqrt(8) (2 pi)^(-d/2) J^(1/2) ||phi||_H2 ||psi||_H2,
// so c_a = 4 sqrt(2) c_e.

#include "qie/error.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace qie {

/// int_0^inf r^(d-1) / (1 + r^4) dr by double-exponential quadrature.
inline double radial_weight_integral(int d) {
    if (d != 2 && d != 3) throw ConfigError("radial integral: dimension must be 2 or 3");
    boost::math::quadrature::exp_sinh<double> integrator;
    auto f = [d](double r) { return std::pow(r, d - 1) / (1.0 + r * r * r * r); };
    return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
}

/// c_e in sup|phi| <= c_e ||phi||_H2.
inline double embedding_constant(int d) {
    if (d != 2 && d != 3) throw ConfigError("embedding constant: dimension must be 2 or 3, got " + std::to_string(d));
    const double sphere = d == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
    const double J = sphere * radial_weight_integral(d);
    // Round up by a few ulps so quadrature error can only make the bound looser.
    return std::pow(2.0 * std::numbers::pi, -0.5 * d) * std::sqrt(J) * (1.0 + 1e-13);
}

/// c_a in ||phi psi||_H2 <= c_a ||phi||_H2 ||psi||_H2.
inline double algebra_constant(int d) {
    if (d != 2 && d != 3) throw ConfigError("algebra constant: dimension must be 2 or 3, got " + std::to_string(d));
    return 4.0 * std::numbers::sqrt2 * embedding_constant(d);
}

inline const char* algebra_constant_derivation() {
    return "c_a = 4*sqrt(2)*c_e: Fourier-side split 1+|xi|^4 <= 8(1+|eta|^4) + 8(1+|xi-eta|^4), "
           "Young L2*L1 on the Fourier side, Cauchy-Schwarz ||psi^||_L1 <= J^(1/2) ||w psi^||_L2 "
           "with J = int (1+|xi|^4)^-1 dxi";
}

inline const char* embedding_constant_derivation() {
    return "c_e = (2*pi)^(-d/2) * (int_{R^d} (1+|xi|^4)^-1 dxi)^(1/2) by Fourier inversion and "
           "Cauchy-Schwarz; radial integral by exp-sinh quadrature";
}

} // namespace qie
