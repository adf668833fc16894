#pragma once

// Shared fixtures for the unit tests: Gaussian closed forms and random
// smooth fields.

#include <cmath>
#include <numbers>
#include <random>

#include "sps/mesh.hpp"

namespace testing {

inline constexpr double pi = std::numbers::pi;

// u(r) = a (pi sigma^2)^(-3/4) exp(-r^2 / (2 sigma^2)), so ||u||_2 = a.
inline double gaussian(double r, double a, double sigma) {
    return a * std::pow(pi * sigma * sigma, -0.75) * std::exp(-r * r / (2.0 * sigma * sigma));
}

inline sps::Field gaussian_field(const sps::Grid& g, double a, double sigma) {
    return sps::Field::from_radial(g, [=](double r) { return gaussian(r, a, sigma); });
}

// int |u|^q for the Gaussian above.
inline double gaussian_lq_pow(double q, double a, double sigma) {
    const double amp = a * std::pow(pi * sigma * sigma, -0.75);
    return std::pow(amp, q) * std::pow(2.0 * pi * sigma * sigma / q, 1.5);
}

// Sum of a few positive Gaussian bumps with random centres and widths, plus
// a signed polynomial modulation. Support stays well inside radius `extent`.
struct RandomSmooth {
    struct Bump {
        double amp, cx, cy, cz, width;
    };
    std::vector<Bump> bumps;
    double c1 = 0.0, c2 = 0.0;

    RandomSmooth(std::mt19937_64& rng, double extent, bool radial) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const int count = 2 + static_cast<int>(rng() % 3);
        for (int i = 0; i < count; ++i) {
            Bump b{};
            b.amp = 0.3 + unit(rng);
            b.width = extent * (0.06 + 0.08 * unit(rng));
            const double off = radial ? 0.0 : extent * 0.15;
            b.cx = off * (2.0 * unit(rng) - 1.0);
            b.cy = off * (2.0 * unit(rng) - 1.0);
            b.cz = off * (2.0 * unit(rng) - 1.0);
            bumps.push_back(b);
        }
        c1 = 0.5 * (2.0 * unit(rng) - 1.0) / extent;
        c2 = 0.5 * (2.0 * unit(rng) - 1.0) / (extent * extent);
    }

    double operator()(double x, double y, double z) const {
        double s = 0.0;
        for (const auto& b : bumps) {
            const double dx = x - b.cx, dy = y - b.cy, dz = z - b.cz;
            s += b.amp * std::exp(-(dx * dx + dy * dy + dz * dz) / (2.0 * b.width * b.width));
        }
        const double r2 = x * x + y * y + z * z;
        return s * (1.0 + c1 * x + c2 * r2);
    }

    sps::Field sample(const sps::Grid& g) const {
        return sps::Field::from_point(g, [this](double x, double y, double z) { return (*this)(x, y, z); });
    }
};

inline double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace testing
