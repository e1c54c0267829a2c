#include <doctest.h>

#include <cmath>
#include <fstream>

#include "isolab/densities.hpp"

using namespace isolab;

namespace {
Point at(double x, double y) {
    Point p(2);
    p << x, y;
    return p;
}
}  // namespace

TEST_CASE("catalog values and limits") {
    const auto f = exp_approach_below(0.5, 1.0);
    CHECK(f(at(2, 0)) == doctest::Approx(1 - 0.5 * std::exp(-2.0)));
    CHECK(*f.limit_at_infinity == 1.0);
    CHECK(f.is_radial());

    const auto g = power_approach_above(3.0, 1.0);
    CHECK(g(at(0.5, 0)) == doctest::Approx(4.0));
    CHECK(g(at(0, 4)) == doctest::Approx(1.75));
}

TEST_CASE("closed-form deviations survive where the density rounds to its limit") {
    const auto f = counterexample_phi(10.0, 3.0);
    const Point x = at(20, 0);
    CHECK(f(x) == 1.0);
    CHECK(f.deviation_at(x) == doctest::Approx(30.0 * std::exp(-190.0)).epsilon(1e-12));
}

TEST_CASE("catalog names round-trip") {
    for (const char* name : {"constant", "exp-approach-below", "counterexample-phi", "abs-cos"}) {
        CHECK(to_string(catalog_from_string(name)) == name);
    }
    CHECK_THROWS_AS(catalog_from_string("densty"), ConfigError);
}

TEST_CASE("sup over directions") {
    const auto h = abs_cos_anisotropy(constant_density(1.0), constant_density(0.5), at(1, 0));
    CHECK(sup_over_directions(h, at(3, 1)) == doctest::Approx(1.5));

    const auto F = fourier_anisotropy(constant_density(2.0), {0.3}, {0.4});
    // 2 (1 + 0.3 cos psi + 0.4 sin psi) peaks at 2 (1 + 0.5).
    CHECK(sup_over_directions(F, at(1, 1)) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("normalize divides by the limits") {
    const auto [f, h] = normalize(constant_density(2.0), isotropic(constant_density(4.0)));
    CHECK(f(at(1, 1)) == doctest::Approx(1.0));
    CHECK(h(at(1, 1), at(1, 0)) == doctest::Approx(1.0));
}

TEST_CASE("radial average of a non-radial density") {
    // Mean of x^2 over the circle of radius t is t^2 / 2.
    const auto g = custom_density([](const Point& x) { return 1.0 + x(0) * x(0) * std::exp(-x.norm()); }, 1.0);
    const auto r = radial_average(g, 2);
    for (double t : {0.5, 2.0, 7.0}) {
        CHECK(r.radial(t) == doctest::Approx(1.0 + 0.5 * t * t * std::exp(-t)).epsilon(1e-10));
    }
}

TEST_CASE("tabulated radial density interpolates and warns once beyond the table") {
    int warnings = 0;
    const auto f = tabulated_radial({{0.0, 2.0}, {1.0, 1.0}, {3.0, 1.0}}, [&](const std::string&) { ++warnings; });
    CHECK(f(at(0.5, 0)) == doctest::Approx(1.5));
    CHECK(f(at(5, 0)) == doctest::Approx(1.0));
    CHECK(f(at(6, 0)) == doctest::Approx(1.0));
    CHECK(warnings == 1);
    CHECK_THROWS_AS(tabulated_radial({{0.0, 1.0}}), ConfigError);
}

TEST_CASE("tabulated radial density from a csv file") {
    const std::string path = "tabulated_test.csv";
    {
        std::ofstream out(path);
        out << "radius,value\n0,3\n2,1\n";
    }
    const auto f = tabulated_radial_from_csv(path);
    CHECK(f(at(1, 0)) == doctest::Approx(2.0));
    std::remove(path.c_str());
}

TEST_CASE("deviation fields are |f - 1| and |h+ - 1|") {
    const auto [ft, ht] = deviation_fields(exp_approach_below(0.5, 1.0), isotropic(exp_approach_above(2.0, 1.0)));
    CHECK(ft(at(1, 0)) == doctest::Approx(0.5 * std::exp(-1.0)));
    CHECK(ht(at(0, 1)) == doctest::Approx(2.0 * std::exp(-1.0)));
}
