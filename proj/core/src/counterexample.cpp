#include <cmath>
#include <limits>
#include <random>

#include "isolab/parallel.hpp"
#include "isolab/profile.hpp"

namespace isolab {

std::string to_string(Evidence e) {
    return e == Evidence::violation_found ? "violation_found" : "consistent_with_nonexistence";
}

std::pair<ScalarDensity, AnisotropicDensity> counterexample_densities(double M) {
    return {counterexample_phi(M, 3.0), isotropic(counterexample_phi(M, 1.0))};
}

CounterexampleReport counterexample_suite(double M, int sample_budget, std::uint64_t seed,
                                          const CounterexampleConfig& cfg) {
    if (!(M > 0)) throw DomainError("counterexample_suite: M must be positive");
    if (sample_budget < 0) throw DomainError("counterexample_suite: negative sample budget");
    const auto [f, h] = counterexample_densities(M);
    const ScalarDensity phi = counterexample_phi(M, 1.0, 0.0);
    const AnisotropicDensity phi_h = isotropic(phi);
    const double V = kPi;

    CounterexampleReport rep;
    rep.M = M;
    rep.seed = seed;

    // Draws happen serially so the sample set depends only on the seed.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<SampleRecord> samples(sample_budget);
    for (int i = 0; i < sample_budget; ++i) {
        SampleRecord& s = samples[i];
        s.id = i;
        for (int attempt = 0;; ++attempt) {
            const double d = cfg.max_centre_distance * unit(rng);
            const double a = 2.0 * kPi * unit(rng);
            s.centre = d * polar_direction(a);
            s.centre_distance = d;
            s.coeffs.assign(1, 1.0);
            for (int k = 1; k <= cfg.modes; ++k) {
                const double sigma = 0.3 / (k * k);
                s.coeffs.push_back(sigma * normal(rng));
                s.coeffs.push_back(sigma * normal(rng));
            }
            try {
                polar_shape(s.centre, s.coeffs, cfg.optimizer.r_min);
                break;
            } catch (const DomainError&) {
                if (attempt > 1000) throw EvaluationError("shape sampler keeps producing invalid shapes");
            }
        }
    }

    OptimizerConfig ocfg = cfg.optimizer;
    ocfg.measure = cfg.measure;
    std::vector<char> evaluated(sample_budget, 0);
    parallel_for(samples.size(), [&](std::size_t i) {
        SampleRecord& s = samples[i];
        try {
            const Shape E = project_to_volume(s.centre, s.coeffs, f, V, ocfg);
            s.perimeter = weighted_perimeter(E, h, cfg.measure).value;
            s.phi_perimeter = weighted_perimeter(E, phi_h, cfg.measure).value;
            s.phi_volume = weighted_volume(E, phi, cfg.measure).value;
            double rmin = std::numeric_limits<double>::infinity();
            double rmax = 0.0;
            for (const auto& pts : boundary_polylines(E, 512)) {
                for (const Point& p : pts) {
                    rmin = std::min(rmin, p.norm());
                    rmax = std::max(rmax, p.norm());
                }
            }
            const bool origin_inside = E.contains(Point::Zero(2));
            s.disjoint_from_unit_ball = !origin_inside && rmin >= 1.0;
            s.inside_unit_ball = rmax <= 1.0;
            evaluated[i] = 1;
        } catch (const Error&) {
            evaluated[i] = 0;
        }
    });

    rep.min_perimeter_seen = std::numeric_limits<double>::infinity();
    for (int i = 0; i < sample_budget; ++i) {
        if (!evaluated[i]) continue;
        const SampleRecord& s = samples[i];
        ++rep.samples_tested;
        rep.min_perimeter_seen = std::min(rep.min_perimeter_seen, s.perimeter);
        if (!(s.perimeter > 2.0 * kPi)) {
            ++rep.perimeter_failures;
            if (!rep.witness) rep.witness = s;
        }
        InequalityCheck c{s.id, s.phi_perimeter, 6.0 * s.phi_volume, s.phi_perimeter - 6.0 * s.phi_volume};
        if (!c.holds()) ++rep.phi_bound_failures;
        rep.phi_bound_checks.push_back(c);
        if (s.disjoint_from_unit_ball) {
            InequalityCheck c2{s.id, s.phi_perimeter, 12.0 * s.phi_volume,
                               s.phi_perimeter - 12.0 * s.phi_volume};
            if (!c2.holds()) ++rep.phi_far_bound_failures;
            rep.phi_far_bound_checks.push_back(c2);
        }
        rep.samples.push_back(s);
    }
    rep.verdict_evidence =
        rep.witness ? Evidence::violation_found : Evidence::consistent_with_nonexistence;

    rep.far_ball_curve = far_ball_scan(f, h, V, cfg.far_ball_schedule, 2, cfg.measure);
    if (cfg.run_optimizer) rep.profile = estimate_profile(f, h, V, ocfg);
    return rep;
}

}  // namespace isolab
