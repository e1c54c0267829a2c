#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "commands.hpp"

namespace fs = std::filesystem;
using isolab::run_command;

namespace {

const std::string kScenarios = ISOLAB_SCENARIO_DIR;

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = run_command(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json report(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "report.json")); }

fs::path fresh(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("isolab_cli_" + name);
    fs::remove_all(d);
    return d;
}

std::string scenario(const std::string& name) { return kScenarios + "/" + name; }

fs::path write_cfg(const std::string& name, const std::string& body) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream(p) << body;
    return p;
}

}  // namespace

TEST_CASE("usage errors exit 64") {
    CHECK(run({"bogus"}).code == 64);
    CHECK(run({"bogus"}).err.find("unknown subcommand 'bogus'") != std::string::npos);
    CHECK(run({}).code == 64);
    CHECK(run({"check"}).code == 64);
    CHECK(run({"profile", "--config", scenario("euclid.cfg"), "--volume", "pi"}).code == 64);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("bad config files exit 1") {
    CHECK(run({"check", "--config", "/nonexistent/x.cfg"}).code == 1);
    const auto p = write_cfg("isolab_bad.cfg", "n = 2\ndensty = 1\n");
    const Run r = run({"check", "--config", p.string(), "--out", fresh("bad").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("densty") != std::string::npos);
}

TEST_CASE("check") {
    const auto dir = fresh("check_escape");
    CHECK(run({"check", "--config", scenario("escape.cfg"), "--out", dir.string()}).code == 2);
    const auto j = report(dir);
    CHECK(j["result"]["verdict"] == "does-not-apply: tail integral convergent");
    CHECK(j["exit_code"] == 2);

    const auto ok = fresh("check_below");
    CHECK(run({"check", "--config", scenario("below.cfg"), "--out", ok.string()}).code == 0);
    CHECK(report(ok)["result"]["overall"] == "applies");
}

TEST_CASE("construct") {
    const auto dir = fresh("construct");
    CHECK(run({"construct", "--config", scenario("below.cfg"), "--volume", "3.14159", "--out", dir.string()}).code == 0);
    const auto j = report(dir);
    const auto& c = j["result"]["construction"];
    CHECK(c["achieved_volume"].get<double>() == doctest::Approx(3.14159).epsilon(1e-9));
    CHECK(c["certificate"].size() >= 4);
    CHECK(fs::exists(dir / "construction.svg"));
    CHECK(slurp(dir / "certificate.csv").rfind("name,lhs,relation,rhs,slack,required,holds\n", 0) == 0);

    const auto no = fresh("construct_escape");
    CHECK(run({"construct", "--config", scenario("escape.cfg"), "--out", no.string()}).code == 2);

    const auto above = fresh("construct_above");
    CHECK(run({"construct", "--config", scenario("above.cfg"), "--volume", "2", "--out", above.string()}).code == 0);
}

TEST_CASE("profile") {
    const auto dir = fresh("profile");
    CHECK(run({"profile", "--config", scenario("euclid.cfg"), "--volume", "3.14159265358979", "--out", dir.string()})
              .code == 0);
    const double J = report(dir)["result"]["J_estimate"].get<double>();
    CHECK(J >= 2 * M_PI * (1 - 1e-9));
    CHECK(J <= 2 * M_PI * 1.01);
    CHECK(fs::exists(dir / "best_shape.svg"));

    const auto p = write_cfg("isolab_3d.cfg", "n = 3\n[density]\nf = constant(1)\nh = constant(1)\n");
    CHECK(run({"profile", "--config", p.string(), "--out", fresh("profile3").string()}).code == 1);
}

TEST_CASE("scan-balls") {
    const auto dir = fresh("scan");
    CHECK(run({"scan-balls", "--config", scenario("escape.cfg"), "--volume", "3.141592653589793", "--out",
               dir.string()})
              .code == 0);
    const std::string csv = slurp(dir / "far_ball.csv");
    CHECK(csv.rfind("R,perimeter,radius\n", 0) == 0);
}

TEST_CASE("slicing") {
    const auto dir = fresh("slicing");
    CHECK(run({"slicing", "--config", scenario("below.cfg"), "--out", dir.string()}).code == 0);
    CHECK(report(dir)["result"]["volume_rel_diff"].get<double>() < 1e-6);
    CHECK(run({"slicing", "--config", scenario("anisotropic.cfg"), "--out", fresh("slicing_aniso").string()}).code ==
          1);
}

TEST_CASE("counterexample") {
    const auto cfg = write_cfg("isolab_cx.cfg",
                               "n = 2\nseed = 9\npreset = escape-to-infinity\n[counterexample]\nM = 10\n"
                               "samples = 6\nrun_optimizer = false\n");
    const auto dir = fresh("cx");
    CHECK(run({"counterexample", "--config", cfg.string(), "--out", dir.string()}).code == 0);
    CHECK(report(dir)["result"]["samples_tested"] == 6);
    CHECK(run({"counterexample", "--config", scenario("below.cfg"), "--out", fresh("cx_bad").string()}).code == 1);
}

TEST_CASE("artifacts are byte-stable and stamped") {
    const auto a = fresh("stable_a");
    const auto b = fresh("stable_b");
    for (const auto& d : {a, b}) {
        CHECK(run({"construct", "--config", scenario("below.cfg"), "--volume", "2", "--seed", "17", "--out",
                   d.string()})
                  .code == 0);
    }
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    const auto j = report(a);
    const std::string hash = j["scenario_hash"];
    CHECK(j["seed"] == 17);
    for (const auto& name : {"certificate.csv", "construction.svg"}) {
        const std::string body = slurp(a / name);
        CHECK(body.find("scenario=" + hash) != std::string::npos);
        CHECK(body.find("seed=17") != std::string::npos);
    }
}
