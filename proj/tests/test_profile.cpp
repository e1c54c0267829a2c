#include <doctest.h>

#include <cmath>

#include "isolab/measures.hpp"
#include "isolab/profile.hpp"

using namespace isolab;

namespace {
Point at(double x, double y) {
    Point p(2);
    p << x, y;
    return p;
}
}  // namespace

TEST_CASE("projection reaches the volume from above within tolerance") {
    const auto f = exp_approach_above(1.0, 1.0);
    OptimizerConfig cfg;
    const Shape E = project_to_volume(at(1, 0), {1.0, 0.2, 0.1}, f, 5.0, cfg);
    const double v = weighted_volume(E, f).value;
    CHECK(v >= 5.0);
    CHECK(v <= 5.0 * (1 + cfg.volume_rel_tol));
}

TEST_CASE("far balls in the unweighted plane all have perimeter 2 sqrt(pi V)") {
    const auto one = constant_density(1.0);
    const auto curve = far_ball_scan(one, isotropic(one), 2.0, {1.5, 3.0, 10.0});
    for (const auto& p : curve) {
        CHECK(p.ok);
        CHECK(p.perimeter == doctest::Approx(2 * std::sqrt(kPi * 2.0)).epsilon(1e-10));
    }
}

TEST_CASE("empty-set compensation value") {
    const auto one = constant_density(1.0);
    CHECK(scarto_rhs(std::nullopt, kPi, 1.0, 2, one, isotropic(one)) == 2 * kPi);
    // n (a omega_n)^{1/n} V^{(n-1)/n} in three dimensions.
    CHECK(scarto_rhs(std::nullopt, 2.0, 1.5, 3, one, isotropic(one)) ==
          doctest::Approx(3 * std::cbrt(1.5 * 4.0 / 3.0 * kPi) * std::cbrt(4.0)).epsilon(1e-14));
    const Shape B = make_ball(at(0, 0), 1.0);
    CHECK(scarto_rhs(B, kPi, 1.0, 2, one, isotropic(one)) == doctest::Approx(2 * kPi).epsilon(1e-12));
}

TEST_CASE("disk has zero Hausdorff distance to itself") {
    CHECK(hausdorff_to_disk(make_ball(at(1, 1), 2.0), at(1, 1), 2.0) < 1e-12);
}

TEST_CASE("optimizer config validation") {
    OptimizerConfig cfg;
    cfg.modes = 17;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("samples outside the unit ball satisfy P_phi >= (M - 1) |E|_phi") {
    // Divergence of phi x/|x| over E: -div = (M - 1/|x|) phi >= (M - 1) phi
    // outside the ball, and the flux through the boundary is at most P_phi.
    CounterexampleConfig cfg;
    cfg.run_optimizer = false;
    const double M = 10.0;
    const auto rep = counterexample_suite(M, 24, 3, cfg);
    CHECK(rep.samples_tested == 24);
    CHECK(rep.perimeter_failures == 0);
    for (const auto& c : rep.phi_far_bound_checks) CHECK(c.lhs >= (M - 1) * c.rhs / 12.0 * (1 - 1e-9));
    const auto again = counterexample_suite(M, 24, 3, cfg);
    CHECK(again.min_perimeter_seen == rep.min_perimeter_seen);
}
