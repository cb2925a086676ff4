#pragma once

// Periodic grids over [-L, L)^d, Fourier transforms with physical scaling and
// the discrete norms (L1, L2, H2, sup) used throughout the library.
//
// Transform convention:
//   F(xi)  = h^d * sum_x f(x) exp(-i xi.x)
//   f(x)   = (2L)^-d * sum_xi F(xi) exp(i xi.x)
// with xi = pi*k/L, k in [-n/2, n/2) per axis. Under this convention
// convolve(K, f)(x) = h^d * sum_y K(x - y) f(y) with periodic wrap.

#include "qie/detail/fftw_plan_cache.hpp"
#include "qie/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace qie {

class Grid {
public:
    Grid(int d, int n, double L) : d_(d), n_(n), L_(L) {
        if (d != 2 && d != 3) throw ConfigError("grid: dimension must be 2 or 3, got " + std::to_string(d));
        if (n < 4 || n % 2 != 0) throw ConfigError("grid: points per axis must be even and >= 4, got " + std::to_string(n));
        if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("grid: half-width L must be positive and finite");
    }

    int dim() const noexcept { return d_; }
    int points_per_axis() const noexcept { return n_; }
    double half_width() const noexcept { return L_; }
    double spacing() const noexcept { return 2.0 * L_ / n_; }
    double cell_volume() const noexcept { return std::pow(spacing(), d_); }
    double volume() const noexcept { return std::pow(2.0 * L_, d_); }

    std::size_t size() const noexcept {
        std::size_t s = 1;
        for (int i = 0; i < d_; ++i) s *= static_cast<std::size_t>(n_);
        return s;
    }

    double coordinate(int j) const noexcept { return -L_ + j * spacing(); }

    /// Signed frequency index in [-n/2, n/2) for array index j.
    int frequency_index(int j) const noexcept { return j < n_ / 2 ? j : j - n_; }
    double frequency(int j) const noexcept { return std::numbers::pi * frequency_index(j) / L_; }

    /// Per-axis array indices of a flat row-major index (axis 0 slowest).
    std::array<int, 3> unflatten(std::size_t flat) const noexcept {
        std::array<int, 3> idx{0, 0, 0};
        for (int a = d_ - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(flat % n_);
            flat /= n_;
        }
        return idx;
    }

    std::size_t flatten(const std::array<int, 3>& idx) const noexcept {
        std::size_t flat = 0;
        for (int a = 0; a < d_; ++a) flat = flat * n_ + static_cast<std::size_t>(idx[a]);
        return flat;
    }

    std::array<double, 3> point(std::size_t flat) const noexcept {
        auto idx = unflatten(flat);
        std::array<double, 3> x{0, 0, 0};
        for (int a = 0; a < d_; ++a) x[a] = coordinate(idx[a]);
        return x;
    }

    /// |xi|^2 at the lattice point stored at flat index.
    double frequency_squared(std::size_t flat) const noexcept {
        auto idx = unflatten(flat);
        double s = 0;
        for (int a = 0; a < d_; ++a) {
            double xi = frequency(idx[a]);
            s += xi * xi;
        }
        return s;
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int d_;
    int n_;
    double L_;
};

class ScalarField {
public:
    explicit ScalarField(Grid grid) : grid_(grid), values_(grid.size(), 0.0) {}

    ScalarField(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.size())
            throw ConfigError("field: expected " + std::to_string(grid_.size()) + " samples, got " +
                              std::to_string(values_.size()));
        for (double v : values_)
            if (!std::isfinite(v)) throw ConfigError("field: non-finite sample");
    }

    template <class F>
    static ScalarField sample(const Grid& grid, F&& f) {
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.point(i));
        return ScalarField(grid, std::move(v));
    }

    const Grid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }

    bool is_zero() const noexcept {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
    }

    ScalarField& operator+=(const ScalarField& o) {
        require_same_grid(o);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o) {
        require_same_grid(o);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }
    ScalarField& operator*=(double a) noexcept {
        for (double& v : values_) v *= a;
        return *this;
    }

    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(double s, ScalarField a) { return a *= s; }

    /// Pointwise product.
    friend ScalarField operator*(const ScalarField& a, const ScalarField& b) {
        a.require_same_grid(b);
        ScalarField out(a.grid_);
        for (std::size_t i = 0; i < a.values_.size(); ++i) out.values_[i] = a.values_[i] * b.values_[i];
        return out;
    }

    void require_same_grid(const ScalarField& o) const {
        if (!(grid_ == o.grid_)) throw ConfigError("field: grid mismatch");
    }

private:
    Grid grid_;
    std::vector<double> values_;
};

class SpectralField {
public:
    SpectralField(Grid grid, std::vector<std::complex<double>> coefficients)
        : grid_(grid), coefficients_(std::move(coefficients)) {
        if (coefficients_.size() != grid_.size()) throw ConfigError("spectral field: size mismatch");
    }

    const Grid& grid() const noexcept { return grid_; }
    std::span<const std::complex<double>> coefficients() const noexcept { return coefficients_; }
    std::span<std::complex<double>> coefficients() noexcept { return coefficients_; }
    std::complex<double> operator[](std::size_t i) const noexcept { return coefficients_[i]; }

private:
    Grid grid_;
    std::vector<std::complex<double>> coefficients_;
};

/// N components on one grid. Component m holds u_m.
class VectorField {
public:
    explicit VectorField(std::vector<ScalarField> components) : components_(std::move(components)) {
        if (components_.empty()) throw ConfigError("vector field: needs at least one component");
        for (const auto& c : components_) components_.front().require_same_grid(c);
    }

    static VectorField zeros(const Grid& grid, int n) {
        return VectorField(std::vector<ScalarField>(static_cast<std::size_t>(n), ScalarField(grid)));
    }

    const Grid& grid() const noexcept { return components_.front().grid(); }
    std::size_t count() const noexcept { return components_.size(); }
    const ScalarField& operator[](std::size_t m) const noexcept { return components_[m]; }
    ScalarField& operator[](std::size_t m) noexcept { return components_[m]; }
    auto begin() const noexcept { return components_.begin(); }
    auto end() const noexcept { return components_.end(); }

    VectorField& operator+=(const VectorField& o) {
        require_compatible(o);
        for (std::size_t m = 0; m < count(); ++m) components_[m] += o.components_[m];
        return *this;
    }
    VectorField& operator-=(const VectorField& o) {
        require_compatible(o);
        for (std::size_t m = 0; m < count(); ++m) components_[m] -= o.components_[m];
        return *this;
    }
    VectorField& operator*=(double a) noexcept {
        for (auto& c : components_) c *= a;
        return *this;
    }
    friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
    friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
    friend VectorField operator*(double s, VectorField a) { return a *= s; }

    void require_compatible(const VectorField& o) const {
        if (o.count() != count()) throw ConfigError("vector field: component count mismatch");
        components_.front().require_same_grid(o.components_.front());
    }

private:
    std::vector<ScalarField> components_;
};

namespace detail {

// (-1)^(k1+...+kd); parity of array index equals parity of signed frequency since n is even.
inline double lattice_phase(const Grid& g, std::size_t flat) {
    auto idx = g.unflatten(flat);
    int s = 0;
    for (int a = 0; a < g.dim(); ++a) s += idx[a];
    return (s % 2 == 0) ? 1.0 : -1.0;
}

} // namespace detail

inline SpectralField forward_transform(const ScalarField& f) {
    const Grid& g = f.grid();
    std::vector<std::complex<double>> in(f.values().begin(), f.values().end());
    std::vector<std::complex<double>> out(g.size());
    detail::dft(g.dim(), g.points_per_axis(), FFTW_FORWARD, in.data(), out.data());
    const double w = g.cell_volume();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= w * detail::lattice_phase(g, i);
    return SpectralField(g, std::move(out));
}

/// Complex-valued inverse; the imaginary part vanishes for conjugate-symmetric input.
inline std::vector<std::complex<double>> inverse_transform_complex(const SpectralField& F) {
    const Grid& g = F.grid();
    std::vector<std::complex<double>> in(g.size());
    const double w = 1.0 / g.volume();
    for (std::size_t i = 0; i < in.size(); ++i) in[i] = F[i] * (w * detail::lattice_phase(g, i));
    std::vector<std::complex<double>> out(g.size());
    detail::dft(g.dim(), g.points_per_axis(), FFTW_BACKWARD, in.data(), out.data());
    return out;
}

inline ScalarField inverse_transform(const SpectralField& F) {
    auto c = inverse_transform_complex(F);
    std::vector<double> re(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) re[i] = c[i].real();
    return ScalarField(F.grid(), std::move(re));
}

/// Applies a real radial multiplier m(|xi|^2) in frequency space.
template <class Multiplier>
ScalarField apply_multiplier(const ScalarField& f, Multiplier&& m) {
    SpectralField F = forward_transform(f);
    auto c = F.coefficients();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= m(f.grid().frequency_squared(i));
    return inverse_transform(F);
}

inline ScalarField convolve(const SpectralField& K_hat, const ScalarField& f) {
    if (!(K_hat.grid() == f.grid())) throw ConfigError("convolve: grid mismatch");
    SpectralField F = forward_transform(f);
    auto c = F.coefficients();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= K_hat[i];
    return inverse_transform(F);
}

inline ScalarField convolve(const ScalarField& K, const ScalarField& f) {
    if (!(K.grid() == f.grid())) throw ConfigError("convolve: grid mismatch");
    return convolve(forward_transform(K), f);
}

inline ScalarField laplacian(const ScalarField& f) {
    return apply_multiplier(f, [](double s) { return -s; });
}

inline double l2_norm(const ScalarField& f) {
    double s = 0;
    for (double v : f.values()) s += v * v;
    return std::sqrt(f.grid().cell_volume() * s);
}

inline double l1_norm(const ScalarField& f) {
    double s = 0;
    for (double v : f.values()) s += std::abs(v);
    return f.grid().cell_volume() * s;
}

inline double sup_norm(const ScalarField& f) {
    double s = 0;
    for (double v : f.values()) s = std::max(s, std::abs(v));
    return s;
}

/// H2 norm from the Fourier side: ((2L)^-d sum |F|^2 (1 + |xi|^4))^(1/2).
inline double h2_norm(const SpectralField& F) {
    const Grid& g = F.grid();
    double s = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double xi2 = g.frequency_squared(i);
        s += std::norm(F[i]) * (1.0 + xi2 * xi2);
    }
    return std::sqrt(s / g.volume());
}

inline double h2_norm(const ScalarField& f) { return h2_norm(forward_transform(f)); }

inline double h2_norm_vector(const VectorField& u) {
    double s = 0;
    for (const auto& c : u) {
        double n = h2_norm(c);
        s += n * n;
    }
    return std::sqrt(s);
}

/// (||K||_L1^2 + ||Delta K||_L1^2)^(1/2).
inline double tilde_w21_norm(const ScalarField& K, const ScalarField& deltaK) {
    K.require_same_grid(deltaK);
    return std::hypot(l1_norm(K), l1_norm(deltaK));
}

/// Fraction of |f|^p mass lying where some coordinate satisfies |x_a| >= 0.9 L.
/// p = 1 for kernels, p = 2 for data fields. Returns 0 for the zero field.
inline double tail_mass_fraction(const ScalarField& f, int p) {
    const Grid& g = f.grid();
    const double edge = 0.9 * g.half_width();
    double total = 0, shell = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double w = p == 1 ? std::abs(f[i]) : f[i] * f[i];
        total += w;
        auto x = g.point(i);
        bool outer = false;
        for (int a = 0; a < g.dim(); ++a) outer = outer || std::abs(x[a]) >= edge;
        if (outer) shell += w;
    }
    return total > 0 ? shell / total : 0.0;
}

inline constexpr double default_tail_mass_threshold = 1e-8;

/// Sharp constant of sup <= c * ||.||_H2 for fields on this grid:
/// ((2L)^-d sum_xi (1+|xi|^4)^-1)^(1/2). Diagnostic only.
inline double discrete_embedding_constant(const Grid& g) {
    double s = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double xi2 = g.frequency_squared(i);
        s += 1.0 / (1.0 + xi2 * xi2);
    }
    return std::sqrt(s / g.volume());
}

} // namespace qie
