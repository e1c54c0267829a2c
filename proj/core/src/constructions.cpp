#include "isolab/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "isolab/parallel.hpp"

namespace isolab {

// Certificates ----------------------------------------------------------

void Certificate::add(std::string name, double lhs, const std::string& relation, double rhs,
                      bool required) {
    CertificateRow row;
    row.name = std::move(name);
    row.lhs = lhs;
    row.relation = relation;
    row.rhs = rhs;
    if (relation == "<=") {
        row.slack = rhs - lhs;
    } else if (relation == ">=") {
        row.slack = lhs - rhs;
    } else {
        throw DomainError("certificate relation must be <= or >=");
    }
    if (std::isnan(row.slack)) row.slack = -std::numeric_limits<double>::infinity();
    row.required = required;
    rows.push_back(std::move(row));
}

bool Certificate::all_hold() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const CertificateRow& r) { return !r.required || r.holds(); });
}

double Certificate::worst_slack() const {
    double w = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        if (r.required) w = std::min(w, r.slack);
    }
    return w;
}

const CertificateRow* Certificate::find(const std::string& name) const {
    for (const auto& r : rows) {
        if (r.name == name) return &r;
    }
    return nullptr;
}

std::string Certificate::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "name,lhs,relation,rhs,slack,required,holds\n";
    for (const auto& r : rows) {
        os << r.name << ',' << r.lhs << ',' << r.relation << ',' << r.rhs << ',' << r.slack << ','
           << (r.required ? 1 : 0) << ',' << (r.holds() ? 1 : 0) << '\n';
    }
    return os.str();
}

// Configuration ---------------------------------------------------------

std::vector<double> SearchConfig::geometric_schedule(double lo, double hi, int count) {
    if (!(lo > 1) || !(hi >= lo) || count < 1) {
        throw DomainError("R schedule needs 1 < lo <= hi and at least one radius");
    }
    std::vector<double> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        out.push_back(count == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
    }
    return out;
}

void SearchConfig::validate(int n) const {
    if (n < 2) throw DomainError("dimension must be at least 2");
    if (!(epsilon > 0) || !(epsilon < 1.0 / (4.0 * n))) {
        throw DomainError("epsilon must lie in (0, 1/(4n))");
    }
    if (!(eta > 0) || !(eta <= epsilon)) throw DomainError("eta must lie in (0, epsilon]");
    if (R_schedule.empty()) throw DomainError("R schedule is empty");
    for (double R : R_schedule) {
        if (!(R > 1) || !std::isfinite(R)) throw DomainError("every scheduled R must be finite and exceed 1");
    }
    if (theta_samples < 4) throw DomainError("theta_samples must be at least 4");
    if (max_candidates < 1) throw DomainError("max_candidates must be positive");
    if (!(vol_tol > 0)) throw DomainError("vol_tol must be positive");
}

namespace {

// Dilations y -> g(lambda y), so that a set built for the dilated densities at
// volume omega_n maps to one of volume m for the originals.
ScalarDensity dilate(const ScalarDensity& g, double lambda) {
    if (lambda == 1.0) return g;
    ScalarDensity d = g;
    auto ev = g.evaluate;
    d.evaluate = [ev, lambda](const Point& x) { return ev(lambda * x); };
    if (g.deviation) {
        auto dv = g.deviation;
        d.deviation = [dv, lambda](const Point& x) { return dv(lambda * x); };
    }
    if (g.radial) {
        auto r = g.radial;
        d.radial = [r, lambda](double t) { return r(lambda * t); };
    }
    if (g.radial_deviation) {
        auto r = g.radial_deviation;
        d.radial_deviation = [r, lambda](double t) { return r(lambda * t); };
    }
    for (double& k : d.kink_radii) k /= lambda;
    d.params["dilation"] = lambda;
    return d;
}

AnisotropicDensity dilate(const AnisotropicDensity& h, double lambda) {
    if (lambda == 1.0) return h;
    AnisotropicDensity d = h;
    auto ev = h.evaluate;
    d.evaluate = [ev, lambda](const Point& x, const Point& nu) { return ev(lambda * x, nu); };
    if (h.exact_sup) {
        auto s = h.exact_sup;
        d.exact_sup = [s, lambda](const Point& x) { return s(lambda * x); };
    }
    if (h.sup_deviation) {
        auto s = h.sup_deviation;
        d.sup_deviation = [s, lambda](const Point& x) { return s(lambda * x); };
    }
    if (h.deviation) {
        auto s = h.deviation;
        d.deviation = [s, lambda](const Point& x, const Point& nu) { return s(lambda * x, nu); };
    }
    if (h.sup_radial) {
        auto s = h.sup_radial;
        d.sup_radial = [s, lambda](double t) { return s(lambda * t); };
    }
    if (h.sup_radial_deviation) {
        auto s = h.sup_radial_deviation;
        d.sup_radial_deviation = [s, lambda](double t) { return s(lambda * t); };
    }
    if (h.isotropic_base) d.isotropic_base = dilate(*h.isotropic_base, lambda);
    for (double& k : d.kink_radii) k /= lambda;
    d.params["dilation"] = lambda;
    return d;
}

// 1 - h(x, nu) as a boundary integrand; radial when h is.
struct DeficitBoundary {
    std::function<double(const Point&, const Point&)> g;
    RadialProfile radial;
    std::vector<double> kinks;
};

DeficitBoundary deficit_boundary(const AnisotropicDensity& h) {
    DeficitBoundary d;
    d.g = [h](const Point& x, const Point& nu) { return -h.deviation_at(x, nu); };
    d.kinks = h.kink_radii;
    if (h.is_rotation_invariant()) {
        const ScalarDensity& b = *h.isotropic_base;
        d.radial = b.radial_deviation ? RadialProfile([rd = b.radial_deviation](double t) { return -rd(t); })
                                      : RadialProfile([r = b.radial](double t) { return 1.0 - r(t); });
        d.kinks.insert(d.kinks.end(), b.kink_radii.begin(), b.kink_radii.end());
    }
    return d;
}

QuadConfig slicing_config() { return QuadConfig{64, 1e-11, 0.0, 20}; }

Shape unit_ball_at(double R, const Point& theta) { return make_ball(R * theta, 1.0); }

// Boundary integral of g and f-volume of the unit ball at R theta; slicing
// when both integrands are radial.
std::pair<double, double> ball_pair(int n, double R, const Point& theta,
                                    const std::function<double(const Point&, const Point&)>& gb,
                                    const RadialProfile& gb_r, const std::vector<double>& gb_kinks,
                                    const ScalarDensity& gv, const MeasureConfig& cfg) {
    if (gb_r && gv.is_radial()) {
        const double P = offcenter_ball_slicing(n, R, gb_r, gb_kinks, slicing_config()).perimeter.value;
        const double V = offcenter_ball_slicing(n, R, gv.radial, gv.kink_radii, slicing_config()).volume.value;
        return {P, V};
    }
    const Shape B = unit_ball_at(R, theta);
    return {boundary_integral(B, gb, gb_kinks, "", cfg).value, weighted_volume(B, gv, cfg).value};
}

std::pair<double, double> scalar_ball_pair(int n, double R, const Point& theta,
                                           const ScalarDensity& gb, const ScalarDensity& gv,
                                           const MeasureConfig& cfg) {
    const auto g = [gb](const Point& x, const Point&) { return gb(x); };
    return ball_pair(n, R, theta, g, gb.is_radial() ? gb.radial : RadialProfile{}, gb.kink_radii,
                     gv, cfg);
}

// Direction perpendicular to theta inside the plane (u, v), turned by +90 degrees.
Point in_plane_normal(const Point& theta, const Point& u, const Point& v) {
    return -theta.dot(v) * u + theta.dot(u) * v;
}

Point direction_on(const Point& u, const Point& v, double angle) {
    return std::cos(angle) * u + std::sin(angle) * v;
}

MeasureConfig root_measure(const MeasureConfig& base, int n) {
    // Swept and lens-shaped regions have kinks the sphere rule does not
    // resolve to the default tolerance in three and more dimensions.
    MeasureConfig m = base;
    if (n >= 3) m.strict = false;
    return m;
}

}  // namespace

double sweep_volume(const ScalarDensity& f, double R, const Point& theta, const Point& nu,
                    double delta, const MeasureConfig& cfg) {
    const Shape F = rotation_sweep(unit_ball_at(R, theta), delta, SweepPlane{theta, nu});
    return weighted_volume(F, f, cfg).value;
}

double lens_volume(const ScalarDensity& f, double R, const Point& theta, const Point& nu,
                   double delta, const MeasureConfig& cfg) {
    const Shape F = lens(unit_ball_at(R, theta), delta, SweepPlane{theta, nu});
    return weighted_volume(F, f, cfg).value;
}


namespace {

// sign * (g - 1), with the closed-form deviation when available.
ScalarDensity offset_density(const ScalarDensity& g, double sign) {
    ScalarDensity d;
    d.params = g.params;
    d.limit_at_infinity = 0.0;
    d.evaluate = [g, sign](const Point& x) { return sign * g.deviation_at(x); };
    if (g.has_exact_deviation()) d.deviation = d.evaluate;
    if (g.is_radial()) {
        d.radial = g.radial_deviation
                       ? RadialProfile([rd = g.radial_deviation, sign](double t) { return sign * rd(t); })
                       : RadialProfile([r = g.radial, sign](double t) { return sign * (r(t) - 1.0); });
        if (g.has_exact_deviation()) d.radial_deviation = d.radial;
    }
    d.kink_radii = g.kink_radii;
    return d;
}

// Uniform angles on the circle, or the single angle 0 when the problem is
// rotation invariant.
std::vector<double> circle_angles(bool invariant, int samples) {
    if (invariant) return {0.0};
    std::vector<double> out(samples);
    for (int i = 0; i < samples; ++i) out[i] = 2.0 * kPi * i / samples;
    return out;
}

// Directions for averaging over the whole sphere.
std::vector<Point> averaging_directions(int n, bool invariant, int samples) {
    if (invariant) return {unit_vector(n, 0)};
    return direction_mesh(n, n == 2 ? samples : std::max(samples, 64));
}

struct BelowProblem {
    int n;
    ScalarDensity f;          // normalized and dilated
    AnisotropicDensity h;
    ScalarDensity deficit_f;  // 1 - f
    DeficitBoundary deficit_h;
    bool invariant;
    MeasureConfig mcfg;

    BelowProblem(int n_, ScalarDensity f_, AnisotropicDensity h_, const MeasureConfig& m)
        : n(n_), f(std::move(f_)), h(std::move(h_)), deficit_f(offset_density(f, -1.0)),
          deficit_h(deficit_boundary(h)), invariant(f.is_radial() && h.is_rotation_invariant()),
          mcfg(m) {}

    // (P_{1-h}(B), |B|_{1-f}) for the unit ball at R theta.
    std::pair<double, double> at(double R, const Point& theta) const {
        return ball_pair(n, R, theta, deficit_h.g, invariant ? deficit_h.radial : RadialProfile{},
                         deficit_h.kinks, deficit_f, mcfg);
    }

    std::pair<double, double> average(double R, int samples) const {
        const auto dirs = averaging_directions(n, invariant, samples);
        std::vector<std::pair<double, double>> vals(dirs.size());
        parallel_for(dirs.size(), [&](std::size_t i) { vals[i] = at(R, dirs[i]); });
        double P = 0.0, V = 0.0;
        for (const auto& [p, v] : vals) { P += p; V += v; }
        return {P / dirs.size(), V / dirs.size()};
    }
};

struct AboveProblem {
    int n;
    ScalarDensity f;
    AnisotropicDensity h;
    ScalarDensity excess_f;  // f - 1
    ScalarDensity htil;      // h+ - 1 in absolute value
    bool invariant;
    MeasureConfig mcfg;

    AboveProblem(int n_, ScalarDensity f_, AnisotropicDensity h_, const MeasureConfig& m)
        : n(n_), f(std::move(f_)), h(std::move(h_)), excess_f(offset_density(f, 1.0)),
          htil(deviation_fields(f, h).second), invariant(f.is_radial() && htil.is_radial()),
          mcfg(m) {}

    struct Values {
        double P = 0.0;   // P_{h~}(B)
        double Vh = 0.0;  // |B|_{h~}
        double Vf = 0.0;  // |B|_{f~}
    };

    Values at(double R, const Point& theta) const {
        const auto [P, Vh] = scalar_ball_pair(n, R, theta, htil, htil, mcfg);
        double Vf;
        if (excess_f.is_radial()) {
            Vf = offcenter_ball_slicing(n, R, excess_f.radial, excess_f.kink_radii, slicing_config())
                     .volume.value;
        } else {
            Vf = weighted_volume(unit_ball_at(R, theta), excess_f, mcfg).value;
        }
        return {P, Vh, Vf};
    }

    Values average(double R, int samples) const {
        const auto dirs = averaging_directions(n, invariant, samples);
        std::vector<Values> vals(dirs.size());
        parallel_for(dirs.size(), [&](std::size_t i) { vals[i] = at(R, dirs[i]); });
        Values out;
        for (const auto& v : vals) { out.P += v.P; out.Vh += v.Vh; out.Vf += v.Vf; }
        out.P /= dirs.size();
        out.Vh /= dirs.size();
        out.Vf /= dirs.size();
        return out;
    }
};

struct DeltaSolve {
    bool ok = false;
    double delta = 0.0;
    std::string why;
};

// Sweep angle with |F_delta|_f = omega_n; the volume grows with delta.
DeltaSolve solve_sweep_delta(const ScalarDensity& f, int n, double R, const Point& theta,
                             const Point& nu, double bound, const SearchConfig& cfg) {
    const MeasureConfig mcfg = root_measure(cfg.measure, n);
    const double target = unit_ball_volume(n);
    const double tol = cfg.vol_tol * target;
    auto excess = [&](double d) {
        if (d == 0.0) return weighted_volume(unit_ball_at(R, theta), f, mcfg).value - target;
        return sweep_volume(f, R, theta, nu, d, mcfg) - target;
    };
    const double e0 = excess(0.0);
    if (e0 >= -tol) return {true, 0.0, ""};
    const double cap = std::min(0.25 * kPi * (1.0 - 1e-12), 0.999 * max_sweep_angle(R, 1.0));
    double hi = bound > 0 ? std::min(cap, 4.0 * bound) : cap;
    double ehi = excess(hi);
    while (ehi < 0 && hi < cap) {
        hi = std::min(cap, 2.0 * hi);
        ehi = excess(hi);
    }
    if (ehi < 0) return {false, hi, "sweep cannot reach the target volume before the angle cap"};
    const RootResult r = bracketed_root(excess, 0.0, hi, 0.5 * tol, 1e-16, 200);
    if (!r.converged) return {false, r.root, "sweep angle search did not converge"};
    return {true, r.root, ""};
}

// Rotation angle with |B cap rho_delta B|_f = omega_n; the volume shrinks with delta.
DeltaSolve solve_lens_delta(const ScalarDensity& f, int n, double R, const Point& theta,
                            const Point& nu, const SearchConfig& cfg) {
    const MeasureConfig mcfg = root_measure(cfg.measure, n);
    const double target = unit_ball_volume(n);
    const double tol = cfg.vol_tol * target;
    auto excess = [&](double d) {
        if (d == 0.0) return weighted_volume(unit_ball_at(R, theta), f, mcfg).value - target;
        return lens_volume(f, R, theta, nu, d, mcfg) - target;
    };
    if (excess(0.0) <= tol) return {true, 0.0, ""};
    const double hi = std::min(0.25 * kPi * (1.0 - 1e-12), 2.0 * std::asin(0.95 / R));
    if (excess(hi) > 0) return {false, hi, "lens keeps too much volume at the angle cap"};
    const RootResult r = bracketed_root(excess, 0.0, hi, 0.5 * tol, 1e-16, 200);
    if (!r.converged) return {false, r.root, "lens angle search did not converge"};
    return {true, r.root, ""};
}

double volume_error(const Shape& F, const ScalarDensity& f, const MeasureConfig& mcfg,
                    double* error) {
    const MeasureResult V = weighted_volume(F, f, mcfg);
    *error = V.error;
    return V.value;
}

// Final bookkeeping: the normalized-coordinates measurements, and the same
// set mapped back by the homothety and measured with the original densities.
void finish_result(ConstructionResult& out, const Shape& F_norm, const ScalarDensity& fd,
                   const AnisotropicDensity& hd, const ScalarDensity& f, const AnisotropicDensity& h,
                   int n, double R, const Point& theta, const Point& nu, double delta, bool sweep,
                   const MeasureConfig& mcfg) {
    const double Pn = weighted_perimeter(F_norm, hd, mcfg).value;
    const double Vn = weighted_volume(F_norm, fd, mcfg).value;
    out.normalized_mean_density = mean_density_from(Pn, Vn, n);

    const double lambda = out.scale;
    const Shape ball = make_ball(lambda * R * theta, lambda);
    const SweepPlane plane{theta, nu};
    const Shape F = delta == 0.0 ? ball : (sweep ? rotation_sweep(ball, delta, plane) : lens(ball, delta, plane));
    out.achieved_volume = weighted_volume(F, f, mcfg).value;
    out.achieved_perimeter = weighted_perimeter(F, h, mcfg).value;
    out.mean_density = mean_density_from(out.achieved_perimeter, out.achieved_volume, n);
    out.shape = F;
    out.delta_bar = delta;
    out.R = R;
    out.theta = theta;
    out.success = true;
}

void check_target(double m) {
    if (!(m > 0) || !std::isfinite(m)) throw DomainError("target volume must be positive and finite");
}

}  // namespace

GoodBall find_good_ball_below(const ScalarDensity& f, const AnisotropicDensity& h, int n,
                              const SearchConfig& cfg) {
    cfg.validate(n);
    auto [fn, hn] = normalize(f, h);
    const BelowProblem prob(n, fn, hn, cfg.measure);
    const double c = n - 1.0 + 2.0 * cfg.epsilon * n;
    double best = -std::numeric_limits<double>::infinity();
    int count = 0;
    for (double R : cfg.R_schedule) {
        if (++count > cfg.max_candidates) break;
        const auto [Pa, Va] = prob.average(R, cfg.theta_samples);
        best = std::max(best, Pa - c * Va);
        if (Pa - c * Va < 0) continue;
        for (const Point& theta : averaging_directions(n, prob.invariant, cfg.theta_samples)) {
            const auto [P, V] = prob.at(R, theta);
            if (P - c * V < 0) continue;
            GoodBall gb;
            gb.R = R;
            gb.theta = theta;
            gb.certificate.add("good_ball", P, ">=", c * V);
            gb.slack = P - c * V;
            gb.radial_average_route = prob.invariant;
            return gb;
        }
    }
    throw NotFoundError("no good ball for the below case on the R schedule", best);
}

GoodBall find_good_ball_above(const ScalarDensity& h_dev, int n, const SearchConfig& cfg) {
    cfg.validate(n);
    const double c = n + cfg.epsilon;
    const bool invariant = h_dev.is_radial();
    auto pair_at = [&](double R, const Point& theta) {
        return scalar_ball_pair(n, R, theta, h_dev, h_dev, cfg.measure);
    };
    double best = -std::numeric_limits<double>::infinity();
    int count = 0;
    for (double R : cfg.R_schedule) {
        if (++count > cfg.max_candidates) break;
        const auto dirs = averaging_directions(n, invariant, cfg.theta_samples);
        std::vector<std::pair<double, double>> vals(dirs.size());
        parallel_for(dirs.size(), [&](std::size_t i) { vals[i] = pair_at(R, dirs[i]); });
        double Pa = 0.0, Va = 0.0;
        for (const auto& [p, v] : vals) { Pa += p; Va += v; }
        if (!(Va > 0)) continue;  // h~ underflows on the ball
        best = std::max(best, (c * Va - Pa) / Va);
        if (Pa > c * Va) continue;
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            const auto [P, V] = vals[i];
            if (!(V > 0) || P > c * V) continue;
            GoodBall gb;
            gb.R = R;
            gb.theta = dirs[i];
            gb.certificate.add("good_ball", P, "<=", c * V);
            gb.slack = c * V - P;
            gb.radial_average_route = invariant;
            return gb;
        }
    }
    throw NotFoundError("no good ball for the above case on the R schedule", best);
}

ConstructionResult build_small_density_set_below(const ScalarDensity& f, const AnisotropicDensity& h,
                                                 int n, double m, const SearchConfig& cfg) {
    cfg.validate(n);
    check_target(m);
    auto [fn, hn] = normalize(f, h);
    const double a = *f.limit_at_infinity;
    const double wn = unit_ball_volume(n);
    const double lambda = std::pow(m / a / wn, 1.0 / n);
    const ScalarDensity fd = dilate(fn, lambda);
    const AnisotropicDensity hd = dilate(hn, lambda);
    const MeasureConfig mcfg = root_measure(cfg.measure, n);
    const BelowProblem prob(n, fd, hd, cfg.measure);
    const double c = n - 1.0 + 2.0 * cfg.epsilon * n;
    const double eps = cfg.epsilon;
    const double wn1 = unit_ball_volume(n - 1);

    ConstructionResult out;
    out.case_name = "below";
    out.target_volume = m;
    out.scale = lambda;

    Certificate last;
    bool have_last = false;
    bool any_ball = false;
    double best = -std::numeric_limits<double>::infinity();
    int count = 0;
    for (double R : cfg.R_schedule) {
        if (++count > cfg.max_candidates) break;
        const auto [Pa, Va] = prob.average(R, cfg.theta_samples);
        best = std::max(best, Pa - c * Va);
        if (Pa - c * Va < 0) continue;
        any_ball = true;

        Point u = unit_vector(n, 0), v = unit_vector(n, 1);
        std::optional<Circle> circle;
        if (!prob.invariant && n >= 3) {
            try {
                circle = sphere_descent(
                    [&](const Point& t) {
                        const auto [P, V] = prob.at(R, t);
                        return P - c * V;
                    },
                    n, cfg.descent);
            } catch (const DescentError&) {
                continue;
            }
            u = circle->u;
            v = circle->v;
        }

        for (double angle : circle_angles(prob.invariant, cfg.theta_samples)) {
            const Point theta = direction_on(u, v, angle);
            const Point nu = in_plane_normal(theta, u, v);
            const auto [P, V] = prob.at(R, theta);
            const double bound = V / ((1.0 - eps) * wn1 * (R - 1.0));

            Certificate cert;
            cert.add("good_ball", Pa, ">=", c * Va);
            cert.add("good_ball_direction", P, ">=", c * V, false);
            const DeltaSolve ds = solve_sweep_delta(fd, n, R, theta, nu, bound, cfg);
            if (!ds.ok) {
                cert.add("delta_bound", ds.delta, "<=", bound);
                cert.add("volume", std::numeric_limits<double>::infinity(), "<=", 0.0);
            } else {
                const Shape ball = unit_ball_at(R, theta);
                const Shape F = ds.delta == 0.0 ? ball : rotation_sweep(ball, ds.delta, SweepPlane{theta, nu});
                double verr = 0.0;
                const double vol = volume_error(F, fd, mcfg, &verr);
                const double per = weighted_perimeter(F, hd, mcfg).value;
                cert.add("delta_bound", ds.delta, "<=", bound);
                cert.add("volume", std::abs(vol - wn), "<=", std::max(cfg.vol_tol * wn, verr));
                cert.add("perimeter", per, "<=", n * wn);
                cert.add("near_one", -fd.deviation_at((R - 1.0) * theta), "<=", eps, false);
                if (cert.all_hold()) {
                    out.certificate = cert;
                    out.circle = circle;
                    finish_result(out, F, fd, hd, f, h, n, R, theta, nu, ds.delta, true, mcfg);
                    if (!prob.invariant && n == 2) out.tau = tau_map(fd, n, R, cfg.theta_samples, cfg);
                    return out;
                }
            }
            if (!have_last || cert.worst_slack() > last.worst_slack()) {
                last = cert;
                have_last = true;
            }
        }
    }
    if (!any_ball) throw NotFoundError("no good ball for the below case on the R schedule", best);
    throw CertificateError("below-case certificate failed at every candidate; extend the R schedule",
                           last);
}

ConstructionResult build_small_density_set_above(const ScalarDensity& f, const AnisotropicDensity& h,
                                                 int n, double m, const SearchConfig& cfg) {
    cfg.validate(n);
    check_target(m);
    auto [fn, hn] = normalize(f, h);
    const double a = *f.limit_at_infinity;
    const double wn = unit_ball_volume(n);
    const double lambda = std::pow(m / a / wn, 1.0 / n);
    const ScalarDensity fd = dilate(fn, lambda);
    const AnisotropicDensity hd = dilate(hn, lambda);
    const MeasureConfig mcfg = root_measure(cfg.measure, n);
    const AboveProblem prob(n, fd, hd, cfg.measure);
    const double eps = cfg.epsilon;
    const double eta = cfg.eta;
    const double wn1 = unit_ball_volume(n - 1);

    ConstructionResult out;
    out.case_name = "above";
    out.target_volume = m;
    out.scale = lambda;

    Certificate last;
    bool have_last = false;
    bool any_ball = false;
    double best = -std::numeric_limits<double>::infinity();
    int count = 0;
    for (double R : cfg.R_schedule) {
        if (++count > cfg.max_candidates) break;
        const AboveProblem::Values avg = prob.average(R, cfg.theta_samples);
        if (!(avg.Vh > 0)) continue;
        const double s1 = (n + eps) * avg.Vh - avg.P;
        const double s2 = (n - 1.0 - eps) * avg.Vf - avg.P;
        best = std::max(best, std::min(s1, s2));
        if (s1 < 0 || s2 < 0) continue;
        any_ball = true;

        Point u = unit_vector(n, 0), v = unit_vector(n, 1);
        std::optional<Circle> circle;
        if (!prob.invariant && n >= 3) {
            try {
                circle = sphere_descent(
                    [&](const Point& t) {
                        const auto val = prob.at(R, t);
                        return (n - 1.0 - eps) * val.Vf - val.P;
                    },
                    n, cfg.descent);
            } catch (const DescentError&) {
                continue;
            }
            u = circle->u;
            v = circle->v;
        }

        for (double angle : circle_angles(prob.invariant, cfg.theta_samples)) {
            const Point theta = direction_on(u, v, angle);
            const Point nu = in_plane_normal(theta, u, v);
            const AboveProblem::Values val = prob.at(R, theta);
            const double bound = (1.0 - 2.0 * eta) * val.Vf / (wn1 * (R + 1.0));

            Certificate cert;
            cert.add("good_ball", avg.P, "<=", (n + eps) * avg.Vh);
            cert.add("volume_ratio", avg.P, "<=", (n - 1.0 - eps) * avg.Vf);
            const DeltaSolve ds = solve_lens_delta(fd, n, R, theta, nu, cfg);
            if (!ds.ok) {
                cert.add("delta_bound", ds.delta, ">=", bound);
                cert.add("volume", std::numeric_limits<double>::infinity(), "<=", 0.0);
            } else {
                const Shape ball = unit_ball_at(R, theta);
                const Shape F = ds.delta == 0.0 ? ball : lens(ball, ds.delta, SweepPlane{theta, nu});
                double verr = 0.0;
                const double vol = volume_error(F, fd, mcfg, &verr);
                const double per = weighted_perimeter(F, hd, mcfg).value;
                cert.add("delta_bound", ds.delta, ">=", bound);
                cert.add("volume", std::abs(vol - wn), "<=", std::max(cfg.vol_tol * wn, verr));
                cert.add("perimeter", per, "<=", n * wn);
                cert.add("near_one", fd.deviation_at((R - 1.0) * theta), "<=", eta, false);
                if (cert.all_hold()) {
                    out.certificate = cert;
                    out.circle = circle;
                    finish_result(out, F, fd, hd, f, h, n, R, theta, nu, ds.delta, false, mcfg);
                    return out;
                }
            }
            if (!have_last || cert.worst_slack() > last.worst_slack()) {
                last = cert;
                have_last = true;
            }
        }
    }
    if (!any_ball) throw NotFoundError("no good ball for the above case on the R schedule", best);
    throw CertificateError("above-case certificate failed at every candidate; extend the R schedule",
                           last);
}

std::vector<TauSample> tau_map(const ScalarDensity& f, int n, double R, int samples,
                               const SearchConfig& cfg) {
    if (samples < 2) throw DomainError("tau_map: need at least 2 samples");
    if (!(R > 1)) throw DomainError("tau_map: R must exceed 1");
    ScalarDensity fn = f;
    if (f.limit_at_infinity && *f.limit_at_infinity != 1.0) {
        fn = normalize(f, isotropic(constant_density(1.0))).first;
    }
    const ScalarDensity deficit = offset_density(fn, -1.0);
    const double eps = cfg.epsilon;
    const double wn1 = unit_ball_volume(n - 1);
    const Point u = unit_vector(n, 0), v = unit_vector(n, 1);

    std::vector<TauSample> out(samples);
    auto solve_at = [&](double angle) {
        const Point theta = direction_on(u, v, angle);
        const Point nu = in_plane_normal(theta, u, v);
        const double V = weighted_volume(unit_ball_at(R, theta), deficit, cfg.measure).value;
        const DeltaSolve ds =
            solve_sweep_delta(fn, n, R, theta, nu, V / ((1.0 - eps) * wn1 * (R - 1.0)), cfg);
        if (!ds.ok) throw ConstructionError("tau_map: " + ds.why);
        return ds.delta;
    };
    const double shared = fn.is_radial() ? solve_at(0.0) : 0.0;
    parallel_for(samples, [&](std::size_t i) {
        const double angle = 2.0 * kPi * i / samples;
        out[i].theta = angle;
        out[i].delta_bar = fn.is_radial() ? shared : solve_at(angle);
    });
    return out;
}

ExistenceReport existence_verdict(const ScalarDensity& f, const AnisotropicDensity& h, int n,
                                  const SearchConfig& cfg, const Annulus& annulus) {
    ExistenceReport rep;
    rep.conditions = condition_report(f, h, n, annulus);
    const double probe = unit_ball_volume(n) * f.limit_at_infinity.value_or(1.0);
    try {
        switch (rep.conditions.verdict) {
            case HypothesisVerdict::below_case_holds:
                rep.construction = build_small_density_set_below(f, h, n, probe, cfg);
                rep.overall = "applies";
                rep.detail = "below-case construction certified";
                break;
            case HypothesisVerdict::above_case_holds:
                rep.construction = build_small_density_set_above(f, h, n, probe, cfg);
                rep.overall = "applies";
                rep.detail = "above-case construction certified";
                break;
            case HypothesisVerdict::trivially_exists:
                rep.overall = "applies";
                rep.detail = "f approaches its limit from above and h+ from below; far balls already satisfy the bound";
                break;
            case HypothesisVerdict::fails:
                rep.overall = "does-not-apply";
                rep.detail = rep.conditions.reason;
                break;
            case HypothesisVerdict::inconclusive:
                rep.overall = "inconclusive";
                rep.detail = rep.conditions.reason;
                break;
        }
    } catch (const Error& e) {
        rep.overall = "inconclusive";
        rep.detail = std::string("hypotheses hold but the construction was not certified: ") + e.what();
    }
    return rep;
}

}  // namespace isolab
