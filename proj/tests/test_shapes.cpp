#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "isolab/measures.hpp"
#include "isolab/shapes.hpp"

using namespace isolab;

namespace {
Point at(double x, double y) {
    Point p(2);
    p << x, y;
    return p;
}
}  // namespace

TEST_CASE("ball membership") {
    const Shape B = make_ball(at(3, 0), 1.0);
    CHECK(B.contains(at(3.5, 0.5)));
    CHECK_FALSE(B.contains(at(4.1, 0)));
    CHECK(B.bounding_radius_about(at(3, 0)) >= 1.0);
}

TEST_CASE("rotation sweep covers every intermediate rotation") {
    const Shape B = make_ball(at(5, 0), 1.0);
    const double d = 0.3;
    const Shape F = rotation_sweep(B, d, coordinate_plane(2));
    for (double s : {0.0, 0.1, 0.2, 0.3}) CHECK(F.contains(5.0 * polar_direction(s)));
    CHECK_FALSE(F.contains(5.0 * polar_direction(-0.25)));
    CHECK(F.piece_names().size() == 3);
}

TEST_CASE("lens is the intersection of the ball and its rotation") {
    const Shape B = make_ball(at(5, 0), 1.0);
    const Shape L = lens(B, 0.1, coordinate_plane(2));
    CHECK(L.contains(5.0 * polar_direction(0.05)));
    CHECK_FALSE(L.contains(at(5, -0.9)));
    CHECK_THROWS_AS(lens(B, 1.0, coordinate_plane(2)), GeometryError);
}

TEST_CASE("sweep angle limit shrinks with distance") {
    CHECK(max_sweep_angle(10.0, 1.0) > max_sweep_angle(100.0, 1.0));
    CHECK(max_sweep_angle(10.0, 1.0) > 0.0);
}

TEST_CASE("polar shapes reject radii below r_min") {
    CHECK_NOTHROW(polar_shape(at(0, 0), {1.0, 0.5}));
    CHECK_THROWS_AS(polar_shape(at(0, 0), {1.0, 1.5}), DomainError);
}

TEST_CASE("disjoint union keeps its gap") {
    const Shape U = union_of({make_ball(at(0, 0), 1.0), make_ball(at(5, 0), 1.0)});
    CHECK(U.parts().size() == 2);
    CHECK(U.contains(at(5, 0.5)));
    CHECK_THROWS(union_of({make_ball(at(0, 0), 1.0), make_ball(at(1, 0), 1.0)}));
}

TEST_CASE("truncate and compensate restores the volume") {
    const auto f = constant_density(1.0);
    const Shape E = make_ball(at(0, 0), 2.0);
    const Shape T = truncate_and_compensate(E, 1.0, f, 4.0 * kPi, at(1, 0), 10.0);
    CHECK(weighted_volume(T, f).value == doctest::Approx(4.0 * kPi).epsilon(1e-9));
    CHECK(compensation_radius(T) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-8));
}

TEST_CASE("svg of the unit disk is one closed path of 256 segments") {
    const std::string svg = to_svg(make_ball(at(0, 0), 1.0));
    CHECK(std::count(svg.begin(), svg.end(), 'M') == 1);
    CHECK(std::count(svg.begin(), svg.end(), 'L') == 255);
    CHECK(std::count(svg.begin(), svg.end(), 'Z') == 1);
    CHECK(svg.find("<path") == svg.rfind("<path"));
}

TEST_CASE("shape json records kind and parameters") {
    const auto j = make_ball(at(1, 2), 0.5).to_json();
    CHECK(j.dump().find("ball") != std::string::npos);
}
