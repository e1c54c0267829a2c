#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "isolab/config.hpp"
#include "isolab/constructions.hpp"
#include "isolab/measures.hpp"
#include "isolab/profile.hpp"
#include "isolab/serialize.hpp"
#include "isolab/shapes.hpp"

namespace isolab {

namespace {

struct Options {
    std::string config;
    std::string out;
    std::string volume;
    std::optional<std::uint64_t> seed;
};

class Artifacts {
public:
    Artifacts(std::filesystem::path dir, const Scenario& sc) : dir_(std::move(dir)), sc_(sc) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw Error("cannot create output directory '" + dir_.string() + "': " + ec.message());
    }

    void csv(const std::string& name, const std::string& body) {
        write(name, stamp_csv(body, sc_.hash(), sc_.seed));
    }
    void svg(const std::string& name, const Shape& shape) {
        write(name, stamp_svg(to_svg(shape), sc_.hash(), sc_.seed));
    }
    void report(const std::string& command, const Json& result, int exit_code,
                const std::vector<std::string>& warnings) {
        Json j{{"command", command},
               {"scenario_hash", sc_.hash()},
               {"seed", sc_.seed},
               {"scenario", sc_.canonical},
               {"result", result},
               {"exit_code", exit_code},
               {"warnings", warnings},
               {"artifacts", files_}};
        write("report.json", dump_stable(j));
    }

private:
    std::filesystem::path dir_;
    const Scenario& sc_;
    std::vector<std::string> files_;

    void write(const std::string& name, const std::string& body) {
        const auto path = dir_ / name;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error("cannot open '" + path.string() + "' for writing");
        f << body;
        if (!f) throw Error("write failed for '" + path.string() + "'");
        if (name != "report.json") files_.push_back(name);
    }
};

double target_volume(const Scenario& sc) {
    return sc.volume ? *sc.volume : unit_ball_volume(sc.n);
}

void require_planar(const Scenario& sc, const std::string& what) {
    if (sc.n != 2) throw DomainError(what + " works in the plane only (n = 2)");
}

int cmd_check(const Scenario& sc, Artifacts& art, std::ostream& err, std::vector<std::string>& warnings) {
    const auto f = sc.make_f([&](const std::string& w) { warnings.push_back(w); });
    const auto h = sc.make_h([&](const std::string& w) { warnings.push_back(w); });
    const ExistenceReport rep = existence_verdict(f, h, sc.n, sc.search, sc.annulus);
    const int code = rep.overall == "applies" ? kExitOk : kExitDoesNotApply;
    err << "verdict: " << rep.overall << ": " << rep.detail << "\n";
    if (rep.construction && rep.construction->shape && sc.n == 2) art.svg("construction.svg", *rep.construction->shape);
    art.report("check", to_json(rep), code, warnings);
    return code;
}

int cmd_scan_balls(const Scenario& sc, Artifacts& art, std::ostream& err, std::vector<std::string>& warnings) {
    const auto f = sc.make_f([&](const std::string& w) { warnings.push_back(w); });
    const auto h = sc.make_h([&](const std::string& w) { warnings.push_back(w); });
    const double V = target_volume(sc);
    const auto curve = far_ball_scan(f, h, V, sc.scan_R, sc.n, sc.search.measure);
    const bool any_ok = std::any_of(curve.begin(), curve.end(), [](const FarBallPoint& p) { return p.ok; });
    for (const auto& p : curve) {
        if (!p.ok) warnings.push_back("R = " + std::to_string(p.R) + ": " + p.error);
    }
    art.csv("far_ball.csv", far_ball_csv(curve));
    const int code = any_ok ? kExitOk : kExitError;
    err << "scanned " << curve.size() << " centre distances\n";
    art.report("scan-balls", Json{{"volume", V}, {"far_ball_curve", to_json(curve)}}, code, warnings);
    return code;
}

int cmd_construct(const Scenario& sc, Artifacts& art, std::ostream& err, std::vector<std::string>& warnings) {
    const auto f = sc.make_f([&](const std::string& w) { warnings.push_back(w); });
    const auto h = sc.make_h([&](const std::string& w) { warnings.push_back(w); });
    const double m = target_volume(sc);
    const ConditionReport cond = condition_report(f, h, sc.n, sc.annulus);
    Json result{{"volume", m}, {"conditions", to_json(cond)}};

    std::optional<ConstructionResult> res;
    if (cond.verdict == HypothesisVerdict::below_case_holds) {
        res = build_small_density_set_below(f, h, sc.n, m, sc.search);
    } else if (cond.verdict == HypothesisVerdict::above_case_holds) {
        res = build_small_density_set_above(f, h, sc.n, m, sc.search);
    } else {
        const std::string why = cond.verdict == HypothesisVerdict::trivially_exists
                                    ? "no construction needed: " + cond.reason
                                    : cond.reason;
        result["verdict"] = "does-not-apply: " + why;
        err << "does-not-apply: " << why << "\n";
        art.report("construct", result, kExitDoesNotApply, warnings);
        return kExitDoesNotApply;
    }

    result["construction"] = to_json(*res);
    art.csv("certificate.csv", res->certificate.to_csv());
    if (!res->tau.empty()) art.csv("tau.csv", tau_csv(res->tau));
    if (res->shape && sc.n == 2) art.svg("construction.svg", *res->shape);
    const int code = res->success && res->certificate.all_hold() ? kExitOk : kExitError;
    result["verdict"] = code == kExitOk ? "constructed" : "construction not certified";
    err << res->case_name << " construction: |F|_f = " << res->achieved_volume
        << ", P_h(F) = " << res->achieved_perimeter << "\n";
    art.report("construct", result, code, warnings);
    return code;
}

int cmd_profile(const Scenario& sc, Artifacts& art, std::ostream& err, std::vector<std::string>& warnings) {
    require_planar(sc, "profile");
    const auto f = sc.make_f([&](const std::string& w) { warnings.push_back(w); });
    const auto h = sc.make_h([&](const std::string& w) { warnings.push_back(w); });
    const double V = target_volume(sc);
    const ProfilePoint p = estimate_profile(f, h, V, sc.optimizer);
    for (const auto& w : p.warnings) warnings.push_back(w);
    art.csv("trace.csv", trace_csv(p.optimizer_trace));
    if (p.best_shape) art.svg("best_shape.svg", *p.best_shape);
    err << "J(" << V << ") <= " << p.J_estimate << "\n";
    art.report("profile", to_json(p), kExitOk, warnings);
    return kExitOk;
}

int cmd_counterexample(const Scenario& sc, Artifacts& art, std::ostream& err,
                       std::vector<std::string>& warnings) {
    require_planar(sc, "counterexample");
    if (sc.preset != "escape-to-infinity") {
        throw ConfigError("counterexample needs preset = escape-to-infinity in the config");
    }
    CounterexampleConfig cfg = sc.counterexample;
    const CounterexampleReport rep = counterexample_suite(sc.M, sc.samples, sc.seed, cfg);
    art.csv("samples.csv", samples_csv(rep.samples));
    art.csv("far_ball.csv", far_ball_csv(rep.far_ball_curve));
    if (rep.profile) {
        art.csv("trace.csv", trace_csv(rep.profile->optimizer_trace));
        if (rep.profile->best_shape) art.svg("best_shape.svg", *rep.profile->best_shape);
    }
    if (rep.phi_far_bound_failures > 0) {
        warnings.push_back(std::to_string(rep.phi_far_bound_failures) +
                           " samples outside the unit ball miss P_phi >= 12 |E|_phi");
    }
    const int code = rep.verdict_evidence == Evidence::violation_found ? kExitDoesNotApply : kExitOk;
    err << rep.samples_tested << " samples, min P_h = " << rep.min_perimeter_seen << ", "
        << to_string(rep.verdict_evidence) << "\n";
    art.report("counterexample", to_json(rep), code, warnings);
    return code;
}

int cmd_slicing(const Scenario& sc, Artifacts& art, std::ostream& err, std::vector<std::string>& warnings) {
    const auto f = sc.make_f([&](const std::string& w) { warnings.push_back(w); });
    const auto h = sc.make_h([&](const std::string& w) { warnings.push_back(w); });
    if (!f.is_radial() || !h.isotropic_hint || !h.sup_radial) {
        throw PreconditionError("slicing needs radial f and radial isotropic h");
    }
    const double R = sc.slicing_R;
    const SlicingResult sf = offcenter_ball_slicing(sc.n, R, f.radial, f.kink_radii);
    const SlicingResult sh = offcenter_ball_slicing(sc.n, R, h.sup_radial, h.kink_radii);
    const Shape ball = make_ball(R * unit_vector(sc.n, 0), 1.0);
    const MeasureResult vq = weighted_volume(ball, f, sc.search.measure);
    const MeasureResult pq = weighted_perimeter(ball, h, sc.search.measure);
    const double dv = std::abs(sf.volume.value - vq.value) / std::abs(vq.value);
    const double dp = std::abs(sh.perimeter.value - pq.value) / std::abs(pq.value);
    Json result{{"R", R},
                {"volume_slicing", to_json(sf.volume)},
                {"perimeter_slicing", to_json(sh.perimeter)},
                {"volume_quadrature", to_json(vq)},
                {"perimeter_quadrature", to_json(pq)},
                {"volume_rel_diff", dv},
                {"perimeter_rel_diff", dp}};
    err << "slicing vs quadrature: volume " << dv << ", perimeter " << dp << "\n";
    art.report("slicing", result, kExitOk, warnings);
    return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Weighted isoperimetric experiments: hypothesis checks, constructions and profiles"};
    app.name("isolab");
    app.require_subcommand(1);
    Options opt;
    std::string volume_text;

    using Handler = int (*)(const Scenario&, Artifacts&, std::ostream&, std::vector<std::string>&);
    const std::vector<std::tuple<std::string, std::string, Handler>> commands{
        {"check", "Evaluate the existence hypotheses and certify a small-density set", cmd_check},
        {"scan-balls", "Weighted perimeter of volume-V balls at growing centre distance", cmd_scan_balls},
        {"construct", "Build a set of the given volume with mean density at most 1", cmd_construct},
        {"profile", "Upper estimate of the isoperimetric profile at volume V", cmd_profile},
        {"counterexample", "Sample volume-pi shapes for the escape-to-infinity densities", cmd_counterexample},
        {"slicing", "Compare one-dimensional slicing with product quadrature for a far ball", cmd_slicing},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, help, _] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "Scenario file")->required();
        sub->add_option("--out", opt.out, "Output directory (default: output.dir of the scenario)");
        sub->add_option("--volume", opt.volume, "Target volume as a decimal literal");
        sub->add_option("--seed", opt.seed, "Random seed, overriding the scenario");
        subs.push_back(sub);
    }

    if (!args.empty() && !args[0].empty() && args[0][0] != '-' &&
        std::none_of(commands.begin(), commands.end(), [&](const auto& c) { return std::get<0>(c) == args[0]; })) {
        err << "unknown subcommand '" << args[0] << "'\n";
        out << app.help();
        return kExitUsage;
    }
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        out << app.help();
        return kExitUsage;
    }

    std::size_t which = 0;
    while (which < subs.size() && !subs[which]->parsed()) ++which;
    const auto& [name, _, handler] = commands[which];

    Scenario sc;
    try {
        sc = load_config(opt.config);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    if (!opt.volume.empty()) {
        try {
            const double v = parse_decimal(opt.volume, "--volume");
            if (!(v > 0)) throw ConfigError("--volume must be positive");
            sc.volume = v;
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            sc.set_override("volume", buf);
        } catch (const ConfigError& e) {
            err << "error: " << e.what() << "\n" << subs[which]->help();
            return kExitUsage;
        }
    }
    if (opt.seed) {
        sc.seed = *opt.seed;
        sc.set_override("seed", std::to_string(*opt.seed));
    }
    const std::string dir = opt.out.empty() ? sc.output_dir : opt.out;

    std::vector<std::string> warnings;
    try {
        Artifacts art(dir, sc);
        try {
            return handler(sc, art, err, warnings);
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            art.report(name, Json{{"error", e.what()}}, kExitError, warnings);
            return kExitError;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

int run_command(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_command(args, std::cout, std::cerr);
}

}  // namespace isolab
