#include <doctest.h>

#include <cmath>

#include "isolab/constructions.hpp"
#include "oracles.hpp"

using namespace isolab;

TEST_CASE("certificate rows") {
    Certificate c;
    c.add("a", 1.0, "<=", 2.0);
    c.add("b", 3.0, ">=", 4.0, false);
    CHECK(c.find("a")->holds());
    CHECK_FALSE(c.find("b")->holds());
    CHECK(c.all_hold());
    CHECK(c.worst_slack() == doctest::Approx(1.0));
    CHECK(c.to_csv().rfind("name,lhs,relation,rhs,slack,required,holds\n", 0) == 0);
}

TEST_CASE("search config validation") {
    SearchConfig cfg;
    CHECK_NOTHROW(cfg.validate(2));
    cfg.epsilon = 0.2;
    CHECK_THROWS_AS(cfg.validate(2), DomainError);
    const auto s = SearchConfig::geometric_schedule(10, 1000, 3);
    CHECK(s[1] == doctest::Approx(100.0));
}

TEST_CASE("sweep volume against the planar seam formula") {
    const auto f = exp_approach_below(1.0, 1.0);
    const double R = 8.0;
    const auto o = oracle::sweep_oracle(f.radial, R, 4000);
    Point theta = Point::Zero(2);
    theta(0) = 1;
    Point nu = Point::Zero(2);
    nu(1) = 1;
    for (double d : {1e-4, 1e-2}) {
        CHECK(sweep_volume(f, R, theta, nu, d) == doctest::Approx(o.ball_volume + d * o.seam_rate).epsilon(1e-11));
    }
}

TEST_CASE("good ball below carries a holding certificate") {
    const auto f = exp_approach_below(1.0, 1.0);
    const GoodBall b = find_good_ball_below(f, isotropic(f), 2, SearchConfig{});
    CHECK(b.R >= 10.0);
    CHECK(b.certificate.find("good_ball")->holds());
}

TEST_CASE("below construction hits the target volume") {
    const auto f = exp_approach_below(1.0, 1.0);
    const auto r = build_small_density_set_below(f, isotropic(f), 2, 2.0, SearchConfig{});
    CHECK(r.success);
    CHECK(r.achieved_volume == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(r.mean_density <= 1.0);
    CHECK(r.certificate.all_hold());
}

TEST_CASE("sphere descent keeps a nonnegative mean") {
    // Mean of x0^2 - 1/4 over S^2 is 1/12; the best circle contains e0.
    const Circle c = sphere_descent([](const Point& w) { return w(0) * w(0) - 0.25; }, 3);
    CHECK(c.mean_gap >= 0.0);
    CHECK(circle_mean([](const Point& w) { return w(0) * w(0) - 0.25; }, c.u, c.v, 256) ==
          doctest::Approx(c.mean_gap).epsilon(1e-9));
    CHECK_THROWS_AS(sphere_descent([](const Point&) { return -1.0; }, 3), DescentError);
}

TEST_CASE("mass decay extinction") {
    CHECK(mass_extinction_time(1.0, 4.0, 2) == doctest::Approx(2.0));
    const DecayTrace t = integrate_mass_decay(2.0, 1.5, 3);
    CHECK(t.extinction_time == doctest::Approx(mass_extinction_time(2.0, 1.5, 3)).epsilon(1e-9));
    CHECK_THROWS_AS(integrate_mass_decay(-1.0, 1.0, 2), DomainError);
}

TEST_CASE("existence verdicts") {
    const auto phi3 = counterexample_phi(10.0, 3.0);
    const auto ex = existence_verdict(phi3, isotropic(counterexample_phi(10.0, 1.0)), 2, SearchConfig{});
    CHECK(ex.overall == "does-not-apply");
    CHECK(ex.detail == "tail integral convergent");

    const auto f = exp_approach_below(1.0, 1.0);
    const auto ok = existence_verdict(f, isotropic(f), 2, SearchConfig{});
    CHECK(ok.overall == "applies");
    REQUIRE(ok.construction.has_value());
}
