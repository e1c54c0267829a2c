// Acceptance run: one PASS/FAIL line per criterion.
//
//   isolab_acceptance [--only N,...] [--expect-fail N,...]
//
// Exit status is nonzero when a criterion fails without being listed in
// --expect-fail, or when a listed one unexpectedly passes.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "isolab/constructions.hpp"
#include "isolab/measures.hpp"
#include "isolab/profile.hpp"
#include "isolab/shapes.hpp"
#include "oracles.hpp"

using namespace isolab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Point centre_of(const Shape& s) {
    const auto& c = s.params().at("centre");
    Point p(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) p(i) = c[i].get<double>();
    return p;
}

Outcome euclidean_baseline() {
    const auto t0 = std::chrono::steady_clock::now();
    const ProfilePoint p = estimate_profile(constant_density(1.0), isotropic(constant_density(1.0)), kPi);
    const double secs = seconds_since(t0);
    const double two_pi = 2 * kPi;
    const double hd = hausdorff_to_disk(*p.best_shape, centre_of(*p.best_shape), 1.0);
    const bool ok = p.J_estimate >= two_pi && p.J_estimate <= 1.01 * two_pi && hd <= 0.05 && secs < 60;
    return {ok, "J - 2pi = " + fmt("%.3e", p.J_estimate - two_pi) + ", Hausdorff " + fmt("%.2e", hd) + ", " +
                    fmt("%.1f", secs) + " s"};
}

Outcome quadrature_oracles() {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    const std::vector<ScalarDensity> scalars{
        constant_density(1.3),          exp_approach_below(0.5, 1.0), exp_approach_above(2.0, 0.5),
        power_approach_above(1.0, 1.0), counterexample_phi(3.0, 1.0),
    };
    std::vector<AnisotropicDensity> anis;
    for (const auto& s : scalars) anis.push_back(isotropic(s));
    anis.push_back(fourier_anisotropy(exp_approach_above(1.0, 1.0), {0.2}, {0.1}));

    constexpr long kSamples = 1000000;
    int worst_draw = -1;
    double worst_z = 0.0;
    int misses = 0;
    for (int d = 0; d < 50; ++d) {
        const ScalarDensity& f = scalars[rng() % scalars.size()];
        AnisotropicDensity h = anis[rng() % anis.size()];
        if (d % 5 == 4) {
            Point axis = polar_direction(2 * kPi * unit(rng));
            h = abs_cos_anisotropy(exp_approach_below(0.5, 0.7), constant_density(0.3), axis);
        }
        oracle::Polar poly;
        poly.centre = 2.5 * std::sqrt(unit(rng)) * polar_direction(2 * kPi * unit(rng));
        for (;;) {
            poly.c.assign(1, 0.5 + unit(rng));
            for (int k = 1; k <= 3; ++k) {
                poly.c.push_back(0.15 * poly.c[0] / (k * k) * normal(rng));
                poly.c.push_back(0.15 * poly.c[0] / (k * k) * normal(rng));
            }
            try {
                polar_shape(poly.centre, poly.c, 1e-3);
                break;
            } catch (const DomainError&) {
            }
        }
        const Shape E = polar_shape(poly.centre, poly.c, 1e-3);
        const double qv = weighted_volume(E, f).value;
        const double qp = weighted_perimeter(E, h).value;
        const auto mv = oracle::mc_volume(poly, f, kSamples, rng());
        const auto mp = oracle::mc_perimeter(poly, h, kSamples, rng());
        for (double z : {std::abs(qv - mv.mean) / mv.se, std::abs(qp - mp.mean) / mp.se}) {
            if (z > 3) ++misses;
            if (z > worst_z) {
                worst_z = z;
                worst_draw = d;
            }
        }
    }

    // Far-ball slicing against product quadrature for radial densities.
    double worst_rel = 0.0;
    const std::vector<ScalarDensity> radial{exp_approach_below(0.5, 1.0), counterexample_phi(3.0, 1.0),
                                            power_approach_above(1.0, 1.0)};
    for (int n : {2, 3}) {
        for (double R : {2.0, 5.0, 20.0}) {
            for (const auto& g : radial) {
                const SlicingResult s = offcenter_ball_slicing(n, R, g.radial, g.kink_radii);
                const Shape B = make_ball(R * unit_vector(n, 0), 1.0);
                const double v = weighted_volume(B, g).value;
                const double p = weighted_perimeter(B, isotropic(g)).value;
                worst_rel = std::max(worst_rel, std::abs(s.volume.value - v) / v);
                worst_rel = std::max(worst_rel, std::abs(s.perimeter.value - p) / p);
            }
        }
    }
    const bool ok = misses == 0 && worst_rel <= 1e-6;
    return {ok, std::to_string(misses) + "/100 comparisons beyond 3 SE (worst z " + fmt("%.2f", worst_z) +
                    " at draw " + std::to_string(worst_draw) + "), slicing rel diff " + fmt("%.1e", worst_rel)};
}

Outcome layer_identities() {
    double worst_int = 0.0;
    for (int n : {2, 3, 4, 5}) {
        const LayerProfiles p = layer_profiles(n, std::numeric_limits<double>::infinity());
        // t = -cos u removes the endpoint singularity of alpha for n = 2.
        const double I = oracle::simpson(
            [&](double u) {
                const double t = -std::cos(u);
                const double s = std::sin(u);
                // At the ends, where t rounds to -1 or 1, use the limit of alpha(t) sin u.
                const double a = 1 - t * t > 0 ? p.alpha(t) * s : (n == 2 ? 2.0 : 0.0);
                return a - n * p.beta(t) * s;
            },
            0.0, kPi, 20000);
        worst_int = std::max(worst_int, std::abs(I));
    }
    double worst_dev = 0.0;
    constexpr int kGrid = 2000;
    for (int n : {2, 3}) {
        const LayerProfiles p = layer_profiles(n, 100.0);
        // Closed interval: alpha is finite at t = -1 and 1 for n = 3. For
        // n = 2 both profiles blow up there and the interior grid suffices.
        for (int i = 0; i <= kGrid; ++i) {
            const double t = -std::cos(kPi * i / kGrid);
            if (n == 2 && (i == 0 || i == kGrid)) continue;
            worst_dev = std::max(worst_dev, std::abs(p.alpha_R(t) / p.alpha(t) - 1.0));
        }
    }
    const bool ok = worst_int <= 1e-10 && worst_dev < 1e-2;
    return {ok, "max |int(alpha - n beta)| = " + fmt("%.1e", worst_int) + ", sup |alpha_R/alpha - 1| at R=100 = " +
                    fmt("%.17g", worst_dev)};
}

Outcome mean_density_invariants() {
    double worst_const = 0.0;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int n : {2, 3}) {
        for (double a : {0.5, 1.0, 3.7}) {
            const ScalarDensity f = constant_density(a);
            const AnisotropicDensity h = isotropic(constant_density(a));
            for (int i = 0; i < 10; ++i) {
                const double r = 0.1 * std::pow(100.0, i / 9.0);
                Point c = Point::Zero(n);
                for (int k = 0; k < n; ++k) c(k) = 10 * (unit(rng) - 0.5);
                const double rho = mean_density(make_ball(c, r), f, h, n);
                worst_const = std::max(worst_const, std::abs(rho - a) / a);
            }
        }
    }
    SearchConfig cfg;
    const auto r1 = build_small_density_set_below(exp_approach_below(1.0, 1.0),
                                                  isotropic(exp_approach_below(1.0, 1.0)), 2, kPi, cfg);
    const auto r2 = build_small_density_set_below(exp_approach_below(1.0, 0.5),
                                                  isotropic(exp_approach_below(1.0, 0.5)), 2, 4 * kPi, cfg);
    const double homothety = std::abs(r1.mean_density - r2.mean_density);
    const bool ok = worst_const <= 1e-9 && homothety <= 1e-6;
    return {ok, "constant-density rho rel error " + fmt("%.1e", worst_const) + ", homothety |rho1 - rho2| = " +
                    fmt("%.1e", homothety)};
}

struct BelowRun {
    ConstructionResult result;
    double seconds = 0.0;
};

const BelowRun& below_run() {
    static const BelowRun run = [] {
        const auto t0 = std::chrono::steady_clock::now();
        BelowRun r;
        r.result = build_small_density_set_below(exp_approach_below(1.0, 1.0),
                                                 isotropic(exp_approach_below(1.0, 1.0)), 2, kPi, SearchConfig{});
        r.seconds = seconds_since(t0);
        return r;
    }();
    return run;
}

bool row_holds(const Certificate& c, const std::string& name) {
    const CertificateRow* r = c.find(name);
    return r && r->holds();
}

Outcome below_construction() {
    const BelowRun& run = below_run();
    const ConstructionResult& r = run.result;
    const ScalarDensity f = exp_approach_below(1.0, 1.0);
    const auto o = oracle::sweep_oracle(f.radial, r.R, 10000);
    const double delta_ref = o.delta(kPi);
    const double rel = std::abs(r.delta_bar - delta_ref) / delta_ref;
    const bool ok = r.success && std::abs(r.achieved_volume - kPi) <= 1e-8 && r.achieved_perimeter <= 2 * kPi &&
                    row_holds(r.certificate, "good_ball") && row_holds(r.certificate, "delta_bound") &&
                    rel <= 1e-6 && run.seconds < 300;
    return {ok, "R = " + fmt("%g", r.R) + ", |F|_f - pi = " + fmt("%.1e", r.achieved_volume - kPi) +
                    ", P_h - 2pi = " + fmt("%.3e", r.achieved_perimeter - 2 * kPi) + ", delta rel diff " +
                    fmt("%.1e", rel) + ", " + fmt("%.1f", run.seconds) + " s"};
}

Outcome above_construction() {
    const ScalarDensity f = power_approach_above(3.0, 1.0);
    const AnisotropicDensity h = isotropic(power_approach_above(1.0, 1.0));
    const ConstructionResult r = build_small_density_set_above(f, h, 2, kPi, SearchConfig{});
    const bool ok = r.success && row_holds(r.certificate, "good_ball") && row_holds(r.certificate, "volume_ratio") &&
                    row_holds(r.certificate, "delta_bound") && r.achieved_perimeter <= 2 * kPi &&
                    std::abs(r.achieved_volume - kPi) <= 1e-8;
    return {ok, "R = " + fmt("%g", r.R) + ", worst required slack " + fmt("%.2e", r.certificate.worst_slack()) +
                    ", P_h - 2pi = " + fmt("%.3e", r.achieved_perimeter - 2 * kPi)};
}

Outcome escape_suite() {
    const auto t0 = std::chrono::steady_clock::now();
    const double M = 10.0;
    const CounterexampleReport rep = counterexample_suite(M, 500, 20240611);
    const auto [f, h] = counterexample_densities(M);
    const ExistenceReport ex = existence_verdict(f, h, 2, SearchConfig{});
    const double secs = seconds_since(t0);

    const auto& curve = rep.far_ball_curve;
    std::size_t peak = 0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        if (curve[i].perimeter > curve[peak].perimeter) peak = i;
    }
    bool decreasing = true;
    for (std::size_t i = peak + 1; i < curve.size(); ++i) {
        const double step = curve[i - 1].perimeter - curve[i].perimeter;
        // Pairs already at 2 pi differ only by rounding.
        const double floor = 64 * std::numeric_limits<double>::epsilon() * curve[i].perimeter;
        if (!(step > 0) && std::abs(step) > floor) decreasing = false;
    }
    double by_five = std::numeric_limits<double>::infinity();
    for (const auto& p : curve) {
        if (p.R <= 5.0) by_five = p.perimeter;
    }
    const bool reaches = by_five <= 2 * kPi + 1e-4;
    const bool verdict = ex.overall == "does-not-apply" && ex.detail.find("tail integral convergent") != std::string::npos;

    double min_far_ratio = std::numeric_limits<double>::infinity();
    for (const auto& c : rep.phi_far_bound_checks) min_far_ratio = std::min(min_far_ratio, 12 * c.lhs / c.rhs);

    const bool ok = rep.samples_tested == 500 && rep.perimeter_failures == 0 && rep.phi_bound_failures == 0 &&
                    rep.phi_far_bound_failures == 0 && decreasing && reaches && verdict && secs < 600;
    std::ostringstream d;
    d << "min P_h - 2pi = " << fmt("%.3e", rep.min_perimeter_seen - 2 * kPi) << ", P_phi >= 6|E|_phi misses "
      << rep.phi_bound_failures << "/" << rep.phi_bound_checks.size() << ", P_phi >= 12|E|_phi misses "
      << rep.phi_far_bound_failures << "/" << rep.phi_far_bound_checks.size() << " (min ratio "
      << fmt("%.2f", min_far_ratio) << "), far-ball decreasing " << (decreasing ? "yes" : "no")
      << ", P(R<=5) - 2pi = " << fmt("%.1e", by_five - 2 * kPi) << ", verdict '" << ex.overall << ": " << ex.detail
      << "', " << fmt("%.0f", secs) << " s";
    return {ok, d.str()};
}

Outcome mass_decay() {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double m0 = 0.1 + 9.9 * unit(rng);
        const double c = 0.5 + 4.5 * unit(rng);
        const int n = 2 + static_cast<int>(rng() % 4);
        const DecayTrace tr = integrate_mass_decay(m0, c, n);
        worst = std::max(worst, std::abs(tr.extinction_time - mass_extinction_time(m0, c, n)));
    }
    return {worst <= 1e-6, "max |T_num - T| = " + fmt("%.1e", worst)};
}

Outcome compensation_identity() {
    const auto [f, h] = counterexample_densities(10.0);
    const double rhs = scarto_rhs(std::nullopt, kPi, 1.0, 2, f, h);
    const double two_pi = 2 * kPi;
    const bool exact = rhs == two_pi;
    const ProfilePoint p = estimate_profile(f, h, kPi, CounterexampleConfig{}.optimizer);
    bool never_below = p.J_estimate >= rhs;
    for (const auto& t : p.optimizer_trace) never_below = never_below && t.perimeter >= rhs;
    const double excess = (p.J_estimate - rhs) / rhs;
    const bool ok = exact && never_below && excess < 0.02;
    return {ok, "empty-set value - 2pi = " + fmt("%.1e", rhs - two_pi) + ", J excess " + fmt("%.2e", excess) +
                    ", trace never below: " + (never_below ? "yes" : "no")};
}

Outcome tau_property() {
    const ConstructionResult& r = below_run().result;
    SearchConfig cfg;
    const auto tau = tau_map(exp_approach_below(1.0, 1.0), 2, r.R, 128, cfg);
    const double lo = 1 - cfg.epsilon - 0.01;
    const double hi = 1 / (1 - cfg.epsilon) + 0.01;
    double qmin = std::numeric_limits<double>::infinity();
    double qmax = -qmin;
    for (std::size_t i = 0; i + 1 < tau.size(); ++i) {
        const double dt = tau[i + 1].theta - tau[i].theta;
        const double q = (tau[i + 1].theta + tau[i + 1].delta_bar - tau[i].theta - tau[i].delta_bar) / dt;
        qmin = std::min(qmin, q);
        qmax = std::max(qmax, q);
    }
    const bool ok = tau.size() == 128 && qmin >= lo && qmax <= hi;
    return {ok, "difference quotients in [" + fmt("%.9f", qmin) + ", " + fmt("%.9f", qmax) + "], allowed [" +
                    fmt("%.3f", lo) + ", " + fmt("%.4f", hi) + "]"};
}

std::set<int> parse_ids(const std::string& s) {
    std::set<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.insert(std::stoi(item));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    setenv("ISOLAB_THREADS", "1", 0);
    std::set<int> only;
    std::set<int> expect_fail;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--only") only = parse_ids(argv[i + 1]);
        else if (flag == "--expect-fail") expect_fail = parse_ids(argv[i + 1]);
    }

    const std::vector<std::tuple<int, std::string, std::function<Outcome()>>> criteria{
        {1, "euclidean baseline", euclidean_baseline},
        {2, "quadrature against Monte-Carlo and slicing", quadrature_oracles},
        {3, "layer-profile identities", layer_identities},
        {4, "mean-density invariants", mean_density_invariants},
        {5, "below-case sweep construction", below_construction},
        {6, "above-case lens construction", above_construction},
        {7, "escape-to-infinity suite", escape_suite},
        {8, "mass decay extinction time", mass_decay},
        {9, "truncate-and-compensate identity", compensation_identity},
        {10, "sweep angle map", tau_property},
    };

    int unexpected = 0;
    for (const auto& [id, name, run] : criteria) {
        if (!only.empty() && !only.count(id)) continue;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const bool expected = expect_fail.count(id) > 0;
        if (o.pass == expected) ++unexpected;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << name << ": " << o.detail
                  << (expected ? (o.pass ? " [listed as expected failure]" : " [expected failure]") : "") << "\n";
        std::cout.flush();
    }
    return unexpected == 0 ? 0 : 1;
}
