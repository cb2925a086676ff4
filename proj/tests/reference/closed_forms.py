"""Independent high-precision reference values frozen into the C++ tests."""
from mpmath import mp, mpf, quad, exp, pi, sqrt, tanh, inf, e

mp.dps = 40

# int_R2 |Delta exp(-|x|^2)| dx = 2 pi int_0^inf |4r^2 - 4| e^{-r^2} r dr
lap_l1 = 2 * pi * quad(lambda r: abs(4 * r**2 - 4) * exp(-r**2) * r, [0, 1, inf])
print("gaussian_laplacian_l1_2d", lap_l1, "8pi/e =", 8 * pi / e)
print("gaussian_w21_2d", sqrt(pi**2 + lap_l1**2))

# ||a exp(-|x|^2)||_H2^2 on R^2 via the Fourier side: F = a pi exp(-|xi|^2/4)
h2sq = (2 * pi) ** -2 * quad(lambda s: (pi * exp(-s**2 / 4)) ** 2 * (1 + s**4) * 2 * pi * s, [0, inf])
print("gaussian_h2_norm_2d", sqrt(h2sq), "squared", h2sq, "4.5pi =", 4.5 * pi)

# ||exp(-|x|^2)||_L2 on R^2 = sqrt(pi/2)
print("gaussian_l2_norm_2d", sqrt(quad(lambda r: exp(-2 * r**2) * 2 * pi * r, [0, inf])))

# Radial weight integrals and embedding constants
for d, area in ((2, 2 * pi), (3, 4 * pi)):
    J = area * quad(lambda r: r ** (d - 1) / (1 + r**4), [0, 1, inf])
    ce = (2 * pi) ** (-mpf(d) / 2) * sqrt(J)
    print("embedding_constant", d, ce, "algebra", 4 * sqrt(2) * ce)

print("tanh_0.25", tanh(mpf("0.25")))
