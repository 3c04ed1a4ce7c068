#pragma once

#include "cwseed/hill_dynamics.hpp"

#include <cmath>
#include <random>

namespace test {

inline constexpr double kMuEarth = 398600.4418;
inline constexpr double kMuSun = 1.32712440018e11;

struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
    double signed_unit() { return uniform(-1.0, 1.0); }
};

inline double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// Textbook CW transition matrix, written out independently of the library.
inline cwseed::Vec6 cw_textbook(const cwseed::Vec6& s0, double n, double t) {
    const double c = std::cos(n * t), s = std::sin(n * t);
    const double x = s0[0], y = s0[1], z = s0[2], vx = s0[3], vy = s0[4], vz = s0[5];
    cwseed::Vec6 out;
    out[0] = (4 - 3 * c) * x + s / n * vx + 2 / n * (1 - c) * vy;
    out[1] = 6 * (s - n * t) * x + y - 2 / n * (1 - c) * vx + (4 * s - 3 * n * t) / n * vy;
    out[2] = c * z + s / n * vz;
    out[3] = 3 * n * s * x + c * vx + 2 * s * vy;
    out[4] = -6 * n * (1 - c) * x - 2 * s * vx + (4 * c - 3) * vy;
    out[5] = -n * s * z + c * vz;
    return out;
}

}  // namespace test

namespace test {

// max(|dr| / R, |dv| / (n R))
inline double scaled(const cwseed::Vec6& a, const cwseed::Vec6& b, double radius, double n) {
    const cwseed::Vec6 d = a - b;
    return std::max(d.head<3>().norm() / radius, d.tail<3>().norm() / (n * radius));
}

}  // namespace test
