#include <doctest.h>

#include <cmath>

#include "isolab/measures.hpp"
#include "isolab/shapes.hpp"
#include "oracles.hpp"

using namespace isolab;

namespace {
Point at(double x, double y) {
    Point p(2);
    p << x, y;
    return p;
}
}  // namespace

TEST_CASE("unweighted balls") {
    const auto one = constant_density(1.0);
    CHECK(weighted_volume(make_ball(at(2, 1), 0.7), one).value == doctest::Approx(kPi * 0.49).epsilon(1e-12));
    CHECK(weighted_perimeter(make_ball(at(2, 1), 0.7), isotropic(one)).value ==
          doctest::Approx(2 * kPi * 0.7).epsilon(1e-12));
    Point c = Point::Zero(3);
    c(0) = 4;
    CHECK(weighted_volume(make_ball(c, 1.0), one).value == doctest::Approx(4.0 / 3.0 * kPi).epsilon(1e-9));
    CHECK(weighted_perimeter(make_ball(c, 1.0), isotropic(one)).value == doctest::Approx(4 * kPi).epsilon(1e-9));
}

TEST_CASE("polar shape area and length") {
    // r = 1 + 0.3 cos t has area pi (1 + 0.045) and length int sqrt(r^2 + r'^2).
    const Shape E = polar_shape(at(0.5, -0.2), {1.0, 0.3});
    const auto one = constant_density(1.0);
    CHECK(weighted_volume(E, one).value == doctest::Approx(kPi * 1.045).epsilon(1e-10));
    const double len = oracle::simpson(
        [](double t) { return std::hypot(1.0 + 0.3 * std::cos(t), 0.3 * std::sin(t)); }, 0.0, 2 * kPi, 4000);
    CHECK(weighted_perimeter(E, isotropic(one)).value == doctest::Approx(len).epsilon(1e-10));
}

TEST_CASE("planar sweep area is pi + 2 R delta") {
    const Shape F = rotation_sweep(make_ball(at(6, 0), 1.0), 0.05, coordinate_plane(2));
    CHECK(weighted_volume(F, constant_density(1.0)).value == doctest::Approx(kPi + 2 * 6 * 0.05).epsilon(1e-10));
}

TEST_CASE("lens area matches the circle-circle formula") {
    const double R = 6.0;
    const double delta = 0.1;
    const double d = 2 * R * std::sin(delta / 2);
    const double expected = 2 * std::acos(d / 2) - 0.5 * d * std::sqrt(4 - d * d);
    const Shape L = lens(make_ball(at(R, 0), 1.0), delta, coordinate_plane(2));
    CHECK(weighted_volume(L, constant_density(1.0)).value == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("quadrature agrees with an independent Monte-Carlo estimate") {
    oracle::Polar p{at(1.5, 0.5), {1.0, 0.1, -0.05, 0.04, 0.02}};
    const Shape E = polar_shape(p.centre, p.c);
    const auto f = exp_approach_above(2.0, 0.5);
    const auto h = fourier_anisotropy(exp_approach_below(0.5, 1.0), {0.2}, {0.1});
    const auto mv = oracle::mc_volume(p, f, 400000, 11);
    const auto mp = oracle::mc_perimeter(p, h, 400000, 12);
    CHECK(std::abs(weighted_volume(E, f).value - mv.mean) <= 4 * mv.se);
    CHECK(std::abs(weighted_perimeter(E, h).value - mp.mean) <= 4 * mp.se);
}

TEST_CASE("library Monte-Carlo carries its seed") {
    const auto r = monte_carlo_volume(make_ball(at(0, 0), 1.0), constant_density(1.0), 200000, 5);
    CHECK(r.seed.has_value());
    CHECK(std::abs(r.value - kPi) <= 4 * r.error);
}

TEST_CASE("mean density of a constant pair is the constant") {
    CHECK(mean_density(make_ball(at(3, 3), 2.0), constant_density(2.5), isotropic(constant_density(2.5)), 2) ==
          doctest::Approx(2.5).epsilon(1e-12));
    CHECK(mean_density_from(2 * kPi, kPi, 2) == doctest::Approx(1.0));
}

TEST_CASE("far-ball slicing against product quadrature in three dimensions") {
    const auto g = exp_approach_below(0.5, 1.0);
    const double R = 4.0;
    const SlicingResult s = offcenter_ball_slicing(3, R, g.radial, g.kink_radii);
    Point c = Point::Zero(3);
    c(0) = R;
    const Shape B = make_ball(c, 1.0);
    CHECK(s.volume.value == doctest::Approx(weighted_volume(B, g).value).epsilon(1e-8));
    CHECK(s.perimeter.value == doctest::Approx(weighted_perimeter(B, isotropic(g)).value).epsilon(1e-8));
}

TEST_CASE("layer profiles integrate to the unit ball") {
    for (int n : {2, 3, 4}) {
        const LayerProfiles p = layer_profiles(n, 10.0);
        const double vol = oracle::simpson([&](double u) { return p.beta_R(-std::cos(u)) * std::sin(u); }, 0, kPi, 4000);
        CHECK(vol == doctest::Approx(unit_ball_volume(n)).epsilon(1e-9));
    }
}
