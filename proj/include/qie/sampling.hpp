#pragma once

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace qie {

/// Halton sequence with a seeded Cranley-Patterson rotation. Dimension <= 17.
class HaltonSequence {
public:
    HaltonSequence(int dim, std::uint64_t seed) : dim_(dim), shift_(static_cast<std::size_t>(dim)) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (auto& s : shift_) s = u(rng);
    }

    std::vector<double> next() {
        static constexpr std::array<int, 17> primes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59};
        ++index_;
        std::vector<double> p(static_cast<std::size_t>(dim_));
        for (int k = 0; k < dim_; ++k) {
            double v = radical_inverse(index_, primes[static_cast<std::size_t>(k)]) + shift_[static_cast<std::size_t>(k)];
            p[static_cast<std::size_t>(k)] = v - std::floor(v);
        }
        return p;
    }

private:
    static double radical_inverse(std::uint64_t i, int base) {
        double inv = 1.0 / base, f = inv, r = 0.0;
        while (i > 0) {
            r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
            i /= static_cast<std::uint64_t>(base);
            f *= inv;
        }
        return r;
    }

    int dim_;
    std::uint64_t index_ = 0;
    std::vector<double> shift_;
};

/// Deterministic point set covering the closed ball |z| <= r in R^n:
/// the centre, the 2n axis extremes, `interior` Halton points mapped into the
/// ball and `boundary` Halton points on the sphere.
inline std::vector<std::vector<double>> ball_point_set(int n, double r, int interior, int boundary,
                                                       std::uint64_t seed) {
    std::vector<std::vector<double>> pts;
    pts.reserve(static_cast<std::size_t>(1 + 2 * n + interior + boundary));
    pts.emplace_back(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        for (double s : {-1.0, 1.0}) {
            std::vector<double> z(static_cast<std::size_t>(n), 0.0);
            z[static_cast<std::size_t>(i)] = s * r;
            pts.push_back(std::move(z));
        }

    HaltonSequence seq(n + 1, seed);
    auto direction = [n](const std::vector<double>& u) {
        std::vector<double> z(static_cast<std::size_t>(n));
        double norm2 = 0;
        for (int k = 0; k < n; ++k) {
            double p = std::clamp(u[static_cast<std::size_t>(k + 1)], 1e-12, 1.0 - 1e-12);
            double g = std::sqrt(2.0) * boost::math::erf_inv(2.0 * p - 1.0);
            z[static_cast<std::size_t>(k)] = g;
            norm2 += g * g;
        }
        double norm = std::sqrt(norm2);
        if (norm == 0.0) {
            z.assign(static_cast<std::size_t>(n), 0.0);
            z[0] = 1.0;
            return z;
        }
        for (double& c : z) c /= norm;
        return z;
    };
    for (int i = 0; i < interior + boundary; ++i) {
        auto u = seq.next();
        auto z = direction(u);
        double radius = i < interior ? r * std::pow(u[0], 1.0 / n) : r;
        for (double& c : z) c *= radius;
        pts.push_back(std::move(z));
    }
    return pts;
}

} // namespace qie
