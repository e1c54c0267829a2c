#pragma once

// Reference computations written without the library's quadrature, used to
// cross-check it. Only the density evaluators are shared.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "isolab/common.hpp"
#include "isolab/densities.hpp"

namespace oracle {

using isolab::kPi;
using isolab::Point;

struct Estimate {
    double mean = 0.0;
    double se = 0.0;
};

/// Composite Simpson on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& g, double a, double b, int panels) {
    if (panels % 2) ++panels;
    const double h = (b - a) / panels;
    double s = g(a) + g(b);
    for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * g(a + i * h);
    return s * h / 3.0;
}

/// r(a) and r'(a) for coefficients [r0, a1, b1, a2, b2, ...].
struct Polar {
    Point centre;
    std::vector<double> c;

    double r(double a) const {
        double v = c[0];
        for (std::size_t k = 1; 2 * k - 1 < c.size(); ++k) {
            v += c[2 * k - 1] * std::cos(k * a);
            if (2 * k < c.size()) v += c[2 * k] * std::sin(k * a);
        }
        return v;
    }
    double dr(double a) const {
        double v = 0.0;
        for (std::size_t k = 1; 2 * k - 1 < c.size(); ++k) {
            v -= k * c[2 * k - 1] * std::sin(k * a);
            if (2 * k < c.size()) v += k * c[2 * k] * std::cos(k * a);
        }
        return v;
    }
    double rmax() const {
        double m = 0.0;
        for (int i = 0; i < 4096; ++i) m = std::max(m, r(2 * kPi * i / 4096));
        return m;
    }
    bool contains(const Point& x) const {
        const Point d = x - centre;
        return d.norm() < r(std::atan2(d(1), d(0)));
    }
};

/// Rejection sampling of the f-volume in the bounding square.
inline Estimate mc_volume(const Polar& s, const isolab::ScalarDensity& f, long samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double R = s.rmax() * 1.001;
    std::uniform_real_distribution<double> u(-R, R);
    double sum = 0.0;
    double sum2 = 0.0;
    Point x(2);
    for (long i = 0; i < samples; ++i) {
        x << s.centre(0) + u(rng), s.centre(1) + u(rng);
        const double v = s.contains(x) ? f(x) : 0.0;
        sum += v;
        sum2 += v * v;
    }
    const double area = 4.0 * R * R;
    const double mean = sum / samples;
    const double var = std::max(sum2 / samples - mean * mean, 0.0);
    return {area * mean, area * std::sqrt(var / samples)};
}

/// Uniform angle sampling of the boundary integral of h(x, nu) |x'(a)|.
inline Estimate mc_perimeter(const Polar& s, const isolab::AnisotropicDensity& h, long samples,
                             std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
    double sum = 0.0;
    double sum2 = 0.0;
    Point x(2);
    Point nu(2);
    for (long i = 0; i < samples; ++i) {
        const double a = u(rng);
        const double r = s.r(a);
        const double dr = s.dr(a);
        const double ca = std::cos(a);
        const double sa = std::sin(a);
        x << s.centre(0) + r * ca, s.centre(1) + r * sa;
        const double tx = dr * ca - r * sa;
        const double ty = dr * sa + r * ca;
        const double speed = std::hypot(tx, ty);
        nu << ty / speed, -tx / speed;
        const double v = h(x, nu) * speed;
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / samples;
    const double var = std::max(sum2 / samples - mean * mean, 0.0);
    return {2 * kPi * mean, 2 * kPi * std::sqrt(var / samples)};
}

/// Planar sweep of the unit ball centred at distance R, for radial f:
/// |F_delta|_f = |B|_f + delta * int_{R-1}^{R+1} s f(s) ds, so the angle that
/// reaches volume target is (target - |B|_f) / int s f(s) ds. Both integrals
/// use s = R - cos u, which smooths the endpoint behaviour.
struct SweepOracle {
    double ball_volume = 0.0;
    double seam_rate = 0.0;
    double delta(double target) const { return (target - ball_volume) / seam_rate; }
};

inline SweepOracle sweep_oracle(const std::function<double(double)>& f_r, double R, int points) {
    SweepOracle o;
    o.ball_volume = simpson(
        [&](double u) {
            const double s = R - std::cos(u);
            const double c = std::clamp((s * s + R * R - 1.0) / (2.0 * s * R), -1.0, 1.0);
            return 2.0 * s * std::acos(c) * f_r(s) * std::sin(u);
        },
        0.0, kPi, points);
    o.seam_rate = simpson(
        [&](double u) {
            const double s = R - std::cos(u);
            return s * f_r(s) * std::sin(u);
        },
        0.0, kPi, points);
    return o;
}

}  // namespace oracle
