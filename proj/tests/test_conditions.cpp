#include <doctest.h>

#include <cmath>

#include "isolab/densities.hpp"

using namespace isolab;

TEST_CASE("convergence classes") {
    const Annulus a;
    CHECK(classify_convergence(exp_approach_below(1.0, 0.1), 2, a).cls == ConvergenceClass::from_below);
    CHECK(classify_convergence(power_approach_above(1.0, 1.0), 2, a).cls == ConvergenceClass::from_above);
    CHECK(classify_convergence(constant_density(1.0), 2, a).cls == ConvergenceClass::exact);
    const auto wobbly = custom_density([](const Point& x) { return 1.0 + std::sin(x.norm()) / x.norm(); }, 1.0);
    CHECK(classify_convergence(wobbly, 2, a).cls == ConvergenceClass::mixed);
}

TEST_CASE("ratio of deviations") {
    const auto [ft, ht] = deviation_fields(exp_approach_below(0.5, 0.1), isotropic(exp_approach_below(1.0, 0.1)));
    const auto r = ratio_condition(ft, ht, Annulus{}, 2);
    CHECK(r.below_constant == doctest::Approx(0.5));
    CHECK(r.above_constant == doctest::Approx(0.5));
    CHECK(r.threshold == doctest::Approx(2.0));
    CHECK(r.below_holds());
}

TEST_CASE("tail integral verdicts") {
    CHECK(tail_integral_diverges([](double t) { return 1.0 / t; }, 10.0).divergent);
    CHECK_FALSE(tail_integral_diverges([](double t) { return std::pow(t, -2.0); }, 10.0).divergent);
    CHECK_FALSE(tail_integral_diverges([](double t) { return std::exp(-t); }, 10.0).divergent);
}

TEST_CASE("escape-to-infinity densities fail on the convergent tail") {
    const auto rep = condition_report(counterexample_phi(10.0, 3.0), isotropic(counterexample_phi(10.0, 1.0)), 2,
                                      Annulus{});
    CHECK(rep.verdict == HypothesisVerdict::fails);
    CHECK(rep.reason == "tail integral convergent");
    CHECK(rep.ratio_min == doctest::Approx(3.0));
}

TEST_CASE("power deviations with ratio 3 satisfy the above case") {
    const auto rep = condition_report(power_approach_above(3.0, 1.0), isotropic(power_approach_above(1.0, 1.0)), 2,
                                      Annulus{});
    CHECK(rep.verdict == HypothesisVerdict::above_case_holds);
}

TEST_CASE("exponential deviations below the limit satisfy the below case") {
    const auto rep = condition_report(exp_approach_below(1.0, 1.0), isotropic(exp_approach_below(1.0, 1.0)), 2,
                                      Annulus{});
    CHECK(rep.verdict == HypothesisVerdict::below_case_holds);
}

TEST_CASE("f from above and h from below exists trivially") {
    const auto rep = condition_report(exp_approach_above(1.0, 1.0), isotropic(exp_approach_below(1.0, 1.0)), 2,
                                      Annulus{});
    CHECK(rep.verdict == HypothesisVerdict::trivially_exists);
}

TEST_CASE("annulus validation") {
    Annulus a;
    a.outer_radius = 5.0;
    CHECK_THROWS_AS(a.validate(), DomainError);
    const auto r = Annulus{}.radii();
    CHECK(r.size() == 32);
    CHECK(r.front() == doctest::Approx(10.0));
    CHECK(r.back() == doctest::Approx(100.0));
}
