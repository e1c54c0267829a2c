#include "isolab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "isolab/parallel.hpp"

namespace isolab {

std::string to_string(ProfileMethod m) {
    switch (m) {
        case ProfileMethod::polar_descent: return "polar_descent";
        case ProfileMethod::far_ball_scan: return "far_ball_scan";
        case ProfileMethod::combined: return "combined";
    }
    return "unknown";
}

void OptimizerConfig::validate() const {
    if (modes < 0 || modes > 16) throw DomainError("optimizer modes must lie in [0, 16]");
    if (max_iterations < 0) throw DomainError("max_iterations must be nonnegative");
    if (!(initial_step > 0) || !(min_step > 0) || min_step > initial_step) {
        throw DomainError("optimizer steps must satisfy 0 < min_step <= initial_step");
    }
    if (centre_distances.empty()) throw DomainError("at least one start distance is required");
    for (double d : centre_distances) {
        if (!(d >= 0) || !std::isfinite(d)) throw DomainError("start distances must be finite and nonnegative");
    }
    if (!(volume_rel_tol > 0)) throw DomainError("volume_rel_tol must be positive");
    if (!(r_min > 0)) throw DomainError("r_min must be positive");
}

namespace {

std::vector<double> scaled_coeffs(const std::vector<double>& c, double s) {
    std::vector<double> out(c);
    for (double& x : out) x *= s;
    return out;
}

struct Projected {
    Shape shape;
    double violation;  // relative
};

Projected project(const Point& centre, const std::vector<double>& coeffs, const ScalarDensity& f,
                  double V, const OptimizerConfig& cfg) {
    // Validity is checked once at unit scale; scaling keeps the sign of r.
    polar_shape(centre, coeffs, cfg.r_min);
    auto volume_at = [&](double s) {
        return weighted_volume(polar_shape(centre, scaled_coeffs(coeffs, s), 0.0), f, cfg.measure).value;
    };
    const double v1 = volume_at(1.0);
    if (!(v1 > 0)) throw EvaluationError("shape has zero f-volume");
    // The accepted volume lies in [V, V (1 + tol)], so the perimeter stays an
    // upper bound for the profile.
    const double tol = cfg.volume_rel_tol;
    const double target = std::log(V) + 0.5 * tol;
    auto accept = [&](double vol) { return vol >= V && vol <= V * (1.0 + tol); };
    auto finish = [&](double scale, double vol) {
        return Projected{polar_shape(centre, scaled_coeffs(coeffs, scale), 0.0), (vol - V) / V};
    };

    // Secant steps on log volume against log scale; exponent 2 for flat densities.
    double ls_prev = 0.0, lv_prev = std::log(v1);
    double ls = 0.5 * (target - lv_prev);
    double slope = 2.0;
    for (int it = 0; it < 30; ++it) {
        const double vol = volume_at(std::exp(ls));
        if (accept(vol)) return finish(std::exp(ls), vol);
        const double lv = std::log(vol);
        const double k = (lv - lv_prev) / (ls - ls_prev);
        if (std::isfinite(k) && k > 0.1) slope = k;
        ls_prev = ls;
        lv_prev = lv;
        ls += (target - lv) / slope;
    }

    // Fallback: bracket and bisect, then keep the side with volume >= V.
    double lo = std::exp(ls), hi = lo;
    int tries = 0;
    while (volume_at(lo) > V) {
        lo *= 0.5;
        if (++tries > 60) throw EvaluationError("volume projection could not be bracketed");
    }
    tries = 0;
    while (volume_at(hi) < V) {
        hi *= 2.0;
        if (++tries > 60) throw EvaluationError("volume projection could not be bracketed");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double vol = volume_at(mid);
        if (accept(vol)) return finish(mid, vol);
        (vol < V ? lo : hi) = mid;
    }
    const double vhi = volume_at(hi);
    if (vhi >= V && vhi <= V * (1.0 + 10.0 * tol)) return finish(hi, vhi);
    throw EvaluationError("volume projection did not converge");
}

// Lower bound hmin * 2 sqrt(pi V / fmax) from Euclidean isoperimetry, with the
// extremes sampled over the disk that contains the shape.
double sanity_floor(const Shape& E, const ScalarDensity& f, const AnisotropicDensity& h, double V) {
    const Point& c = E.parts().front()->star_centre();
    const double rad = E.bounding_radius_about(c);
    double fmax = 0.0;
    double hmin = std::numeric_limits<double>::infinity();
    const auto dirs = direction_mesh(2, 16);
    for (int i = 0; i <= 16; ++i) {
        const double r = rad * i / 16.0;
        for (int j = 0; j < 64; ++j) {
            const Point x = c + r * polar_direction(2.0 * kPi * j / 64);
            fmax = std::max(fmax, f(x));
            for (const Point& nu : dirs) hmin = std::min(hmin, h(x, nu));
            if (i == 0) break;
        }
    }
    return hmin * 2.0 * std::sqrt(kPi * V / fmax);
}

}  // namespace

Shape project_to_volume(const Point& centre, std::vector<double> coeffs, const ScalarDensity& f,
                        double V, const OptimizerConfig& cfg) {
    if (!(V > 0)) throw DomainError("target volume must be positive");
    return project(centre, coeffs, f, V, cfg).shape;
}

ProfilePoint estimate_profile(const ScalarDensity& f, const AnisotropicDensity& h, double V,
                              const OptimizerConfig& cfg) {
    cfg.validate();
    if (!(V > 0)) throw DomainError("target volume must be positive");

    struct StartOutcome {
        bool feasible = false;
        double perimeter = std::numeric_limits<double>::infinity();
        std::optional<Shape> shape;
        std::vector<TraceRow> trace;
        bool stagnated = false;
    };
    std::vector<StartOutcome> outcomes(cfg.centre_distances.size());

    parallel_for(cfg.centre_distances.size(), [&](std::size_t s) {
        StartOutcome& out = outcomes[s];
        const int nv = 2 + 2 * cfg.modes;
        // x = (cx, cy, a1, b1, ..., aK, bK); r0 is fixed at 1 before projection.
        std::vector<double> x(nv, 0.0);
        x[0] = cfg.centre_distances[s];
        auto evaluate = [&](const std::vector<double>& y, Projected* keep) {
            Point centre(2);
            centre << y[0], y[1];
            std::vector<double> coeffs{1.0};
            coeffs.insert(coeffs.end(), y.begin() + 2, y.end());
            try {
                Projected p = project(centre, coeffs, f, V, cfg);
                const double P = weighted_perimeter(p.shape, h, cfg.measure).value;
                if (keep) *keep = p;
                return P;
            } catch (const Error&) {
                return std::numeric_limits<double>::infinity();
            }
        };
        std::optional<Projected> current;
        {
            Projected p{make_ball(Point::Zero(2), 1.0), 0.0};
            const double P = evaluate(x, &p);
            if (!std::isfinite(P)) return;
            current = p;
            out.perimeter = P;
        }
        out.feasible = true;
        out.trace.push_back({0, out.perimeter, current->violation, std::hypot(x[0], x[1])});

        double step = cfg.initial_step;
        int iter = 0;
        while (iter < cfg.max_iterations && step >= cfg.min_step) {
            ++iter;
            bool improved = false;
            for (int j = 0; j < nv; ++j) {
                for (double sign : {1.0, -1.0}) {
                    std::vector<double> y = x;
                    y[j] += sign * step;
                    Projected p = *current;
                    const double P = evaluate(y, &p);
                    if (P < out.perimeter * (1.0 - 1e-14)) {
                        x = y;
                        out.perimeter = P;
                        current = p;
                        improved = true;
                        break;
                    }
                }
            }
            if (improved) {
                out.trace.push_back({iter, out.perimeter, current->violation, std::hypot(x[0], x[1])});
                step = std::min(2.0 * step, cfg.initial_step * 16.0);
            } else {
                step *= 0.5;
            }
        }
        out.stagnated = step >= cfg.min_step;
        out.shape = current->shape;
    });

    ProfilePoint pp;
    pp.V = V;
    pp.method = ProfileMethod::polar_descent;
    int best = -1;
    for (std::size_t s = 0; s < outcomes.size(); ++s) {
        const auto& o = outcomes[s];
        pp.start_results.emplace_back(cfg.centre_distances[s], o.perimeter);
        if (!o.feasible) {
            pp.warnings.push_back("start at distance " + std::to_string(cfg.centre_distances[s]) +
                                  " is infeasible");
            continue;
        }
        if (o.stagnated) {
            pp.warnings.push_back("start at distance " + std::to_string(cfg.centre_distances[s]) +
                                  " hit the iteration limit before the step converged");
        }
        if (best < 0 || o.perimeter < outcomes[best].perimeter) best = static_cast<int>(s);
    }
    if (best < 0) throw EvaluationError("estimate_profile: no feasible start");
    const auto& o = outcomes[best];
    pp.J_estimate = o.perimeter;
    pp.best_shape = o.shape;
    pp.optimizer_trace = o.trace;
    pp.best_centre_distance = o.trace.back().centre_distance;
    pp.sanity_floor = sanity_floor(*o.shape, f, h, V);
    if (pp.J_estimate < pp.sanity_floor * (1.0 - 1e-9)) {
        throw EvaluationError("estimate_profile: estimate " + std::to_string(pp.J_estimate) +
                              " is below the isoperimetric floor " + std::to_string(pp.sanity_floor));
    }
    return pp;
}

double scarto_rhs(const std::optional<Shape>& E, double V, double a, int n, const ScalarDensity& f,
                  const AnisotropicDensity& h, const MeasureConfig& cfg) {
    if (!(V >= 0) || !(a > 0) || n < 2) throw DomainError("scarto_rhs: need V >= 0, a > 0, n >= 2");
    double P = 0.0;
    double vol = 0.0;
    if (E && !E->empty()) {
        vol = weighted_volume(*E, f, cfg).value;
        P = weighted_perimeter(*E, h, cfg).value;
    }
    if (vol > V * (1.0 + 1e-12)) {
        throw DomainError("scarto_rhs: the set's f-volume exceeds V");
    }
    const double rest = std::max(V - vol, 0.0);
    // One root of the product rounds once; for the planar case with a = 1 and
    // V = pi this gives 2 pi exactly.
    const double inner = a * unit_ball_volume(n) * std::pow(rest, n - 1);
    return P + n * (n == 2 ? std::sqrt(inner) : std::pow(inner, 1.0 / n));
}

std::vector<FarBallPoint> far_ball_scan(const ScalarDensity& f, const AnisotropicDensity& h,
                                        double V, const std::vector<double>& R_schedule, int n,
                                        const MeasureConfig& cfg) {
    if (!(V > 0)) throw DomainError("far_ball_scan: V must be positive");
    if (n < 2) throw DomainError("far_ball_scan: dimension must be at least 2");
    std::vector<FarBallPoint> out(R_schedule.size());
    parallel_for(R_schedule.size(), [&](std::size_t i) {
        FarBallPoint& pt = out[i];
        pt.R = R_schedule[i];
        try {
            const Point c = pt.R * unit_vector(n, 0);
            auto excess = [&](double r) { return weighted_volume(make_ball(c, r), f, cfg).value - V; };
            const double r0 = std::pow(V / unit_ball_volume(n), 1.0 / n);
            double lo = r0, hi = r0;
            int tries = 0;
            while (excess(lo) > 0) {
                lo *= 0.5;
                if (++tries > 60) throw EvaluationError("radius root not bracketed");
            }
            tries = 0;
            while (excess(hi) < 0) {
                hi *= 2.0;
                if (++tries > 60) throw EvaluationError("radius root not bracketed");
            }
            const RootResult r = bracketed_root(excess, lo, hi, 1e-13 * V, 1e-16 * hi);
            if (!r.converged) throw EvaluationError("radius root did not converge");
            pt.radius = r.root;
            pt.perimeter = weighted_perimeter(make_ball(c, r.root), h, cfg).value;
        } catch (const Error& e) {
            pt.ok = false;
            pt.error = e.what();
        }
    });
    return out;
}

double hausdorff_to_disk(const Shape& shape, const Point& centre, double radius, int samples) {
    double worst = 0.0;
    for (const auto& part : shape.parts()) {
        for (int i = 0; i < samples; ++i) {
            const BoundarySample b = part->boundary(polar_direction(2.0 * kPi * i / samples));
            worst = std::max(worst, std::abs((b.point - centre).norm() - radius));
        }
    }
    return worst;
}

}  // namespace isolab
