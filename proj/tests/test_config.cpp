#include <doctest.h>

#include <cmath>
#include <fstream>

#include "isolab/config.hpp"
#include "isolab/serialize.hpp"

using namespace isolab;

namespace {
const char* kMinimal = "n = 2\n[density]\nf = constant(1)\nh = constant(1)\n";

std::string error_of(const std::string& text) {
    try {
        parse_config(text, "t.cfg");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}
}  // namespace

TEST_CASE("minimal scenario gets every default") {
    const Scenario sc = parse_config(kMinimal);
    CHECK(sc.n == 2);
    CHECK(sc.seed == 0);
    CHECK(sc.f.kind == "constant");
    CHECK(sc.annulus.inner_radius == 10.0);
    CHECK(sc.annulus.radial_samples == 32);
    CHECK(sc.search.epsilon == SearchConfig{}.epsilon);
    CHECK(sc.optimizer.modes == OptimizerConfig{}.modes);
    CHECK_FALSE(sc.volume.has_value());
}

TEST_CASE("escape-to-infinity preset") {
    const Scenario sc = parse_config("preset = sec4\n[counterexample]\nM = 7\n");
    CHECK(sc.preset == "escape-to-infinity");
    CHECK(sc.f.kind == "counterexample-phi");
    CHECK(sc.f.params.at("scale") == 3.0);
    CHECK(sc.h.params.at("scale") == 1.0);
    CHECK(sc.f.params.at("M") == 7.0);
    const auto f = sc.make_f();
    Point x = Point::Zero(2);
    CHECK(f(x) == doctest::Approx(22.0));
    CHECK(error_of("preset = escape-to-infinity\n[density]\nf = constant(1)\n").find("fixes both") !=
          std::string::npos);
}

TEST_CASE("unknown keys are errors naming key and line") {
    const std::string e = error_of("n = 2\ndensty = 3\n");
    CHECK(e.find("densty") != std::string::npos);
    CHECK(e.find("t.cfg:2") != std::string::npos);
    CHECK(error_of("[search]\nepsilon = 0.01\nbogus = 1\n").find("search.bogus") != std::string::npos);
}

TEST_CASE("density expressions") {
    const Scenario a = parse_config("[density]\nf = exp-approach-below(0.5, 2)\nh = constant(1)\n");
    const Scenario b = parse_config("[density]\nf = exp-approach-below(rate=2, amplitude=0.5)\nh = constant(1)\n");
    CHECK(canonical_text(a.f) == canonical_text(b.f));
    CHECK(a.hash() == b.hash());

    const Scenario c = parse_config(
        "[density]\nf = constant(1)\nh = abs-cos(a=constant(1), b=exp-approach-below(0.2), axis=[0, 1])\n");
    CHECK(c.h.parts.at("b").params.at("rate") == 1.0);
    Point x = Point::Zero(2);
    x(0) = 3;
    Point nu = Point::Zero(2);
    nu(1) = 1;
    CHECK(c.make_h()(x, nu) == doctest::Approx(1.0 + 1 - 0.2 * std::exp(-3.0)));

    CHECK(error_of("[density]\nf = abs-cos(a=constant(1), b=constant(1), axis=[1,0])\nh = constant(1)\n")
              .find("scalar kind") != std::string::npos);
    CHECK(error_of("[density]\nf = wobble(1)\nh = constant(1)\n").find("unknown density kind") != std::string::npos);
    CHECK(error_of("[density]\nf = constant()\nh = constant(1)\n").find("needs parameter") != std::string::npos);
    CHECK(error_of("[density]\nf = constant(1, 2)\nh = constant(1)\n").find("too many") != std::string::npos);
}

TEST_CASE("numbers are decimal literals only") {
    CHECK(parse_decimal("3.14159", "v") == 3.14159);
    CHECK(parse_decimal("-1e-3", "v") == -1e-3);
    CHECK_THROWS_AS(parse_decimal("pi", "v"), ConfigError);
    CHECK_THROWS_AS(parse_decimal("0x10", "v"), ConfigError);
    CHECK_THROWS_AS(parse_decimal("1e999", "v"), ConfigError);
    CHECK(error_of("volume = pi\n[density]\nf = constant(1)\nh = constant(1)\n").find("decimal") !=
          std::string::npos);
}

TEST_CASE("hash follows settings and overrides") {
    Scenario a = parse_config(kMinimal);
    const Scenario b = parse_config("seed = 4\n" + std::string(kMinimal));
    CHECK(a.hash() != b.hash());
    CHECK(a.hash().size() == 16);
    const std::string before = a.hash();
    a.set_override("volume", "2");
    CHECK(a.hash() != before);
    CHECK(fnv1a("") == 1469598103934665603ULL);
}

TEST_CASE("tabulated files resolve against the config directory") {
    {
        std::ofstream out("radial_table.csv");
        out << "0,2\n5,1\n";
    }
    {
        std::ofstream out("tab.cfg");
        out << "[density]\nf = tabulated-radial(file=radial_table.csv)\nh = constant(1)\n";
    }
    const Scenario sc = load_config("tab.cfg");
    Point x = Point::Zero(2);
    x(0) = 2.5;
    CHECK(sc.make_f()(x) == doctest::Approx(1.5));
    std::remove("radial_table.csv");
    std::remove("tab.cfg");
    CHECK_THROWS_AS(load_config("no_such.cfg"), ConfigError);
}

TEST_CASE("stable json dump") {
    Json j{{"b", 0.1}, {"a", {1, 2}}, {"c", std::numeric_limits<double>::infinity()}};
    CHECK(dump_stable(j) == "{\n  \"a\": [\n    1,\n    2\n  ],\n  \"b\": 0.10000000000000001,\n  \"c\": null\n}\n");
}

TEST_CASE("csv writers start with their header") {
    CHECK(far_ball_csv({{2.0, 6.3, 1.0, true, ""}}) == "R,perimeter,radius\n2,6.2999999999999998,1\n");
    CHECK(stamp_csv("x\n", "abc", 5) == "x\n# scenario=abc seed=5\n");
}
