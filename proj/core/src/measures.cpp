#include "isolab/measures.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "isolab/parallel.hpp"

namespace isolab {

namespace {

double wrap_angle(double t, double lo) {
    const double two_pi = 2.0 * kPi;
    t = std::fmod(t - lo, two_pi);
    if (t < 0) t += two_pi;
    return lo + t;
}

// Angles where the boundary of a planar part crosses one of the circles |x| = k.
std::vector<double> crossing_angles(const StarRegion& part, const std::vector<double>& radii) {
    std::vector<double> out;
    if (radii.empty()) return out;
    const Point& c = part.star_centre();
    const double reach = c.norm() + part.bounding_radius();
    const double near = std::max(0.0, c.norm() - part.bounding_radius());
    constexpr int kScan = 1024;
    std::vector<double> mod(kScan + 1);
    for (int i = 0; i <= kScan; ++i) {
        const Point w = polar_direction(-kPi + 2.0 * kPi * i / kScan);
        mod[i] = (c + part.exit_distance(w) * w).norm();
    }
    for (double k : radii) {
        if (k < near || k > reach) continue;
        auto gap = [&](double t) {
            const Point w = polar_direction(t);
            return (c + part.exit_distance(w) * w).norm() - k;
        };
        for (int i = 0; i < kScan; ++i) {
            const double a = mod[i] - k;
            const double b = mod[i + 1] - k;
            if ((a > 0) != (b > 0)) {
                const double t0 = -kPi + 2.0 * kPi * i / kScan;
                const double t1 = -kPi + 2.0 * kPi * (i + 1) / kScan;
                out.push_back(bracketed_root(gap, t0, t1, 0.0, 1e-15).root);
            }
        }
    }
    return out;
}

// Ray directions from c tangent to the circles |x| = k.
std::vector<double> tangent_angles(const Point& c, const std::vector<double>& radii) {
    std::vector<double> out;
    const double d = c.norm();
    if (d == 0.0) return out;
    const double back = std::atan2(-c(1), -c(0));
    for (double k : radii) {
        if (k > 0 && k < d) {
            const double a = std::asin(k / d);
            out.push_back(back + a);
            out.push_back(back - a);
        }
    }
    return out;
}

// Roots s > 0 of |c + s w| = k.
void ray_kinks(const Point& c, const Point& w, const std::vector<double>& radii, double smax,
               std::vector<double>& out) {
    out.clear();
    const double b = c.dot(w);
    const double cc = c.squaredNorm();
    for (double k : radii) {
        const double disc = b * b - (cc - k * k);
        if (disc <= 0) continue;
        const double sq = std::sqrt(disc);
        for (double s : {-b - sq, -b + sq}) {
            if (s > 0 && s < smax) out.push_back(s);
        }
    }
}

struct DirectionIntegral {
    double value = 0.0;
    double error = 0.0;
    long nodes = 0;
    bool converged = true;
};

int sphere_level(int n, const MeasureConfig& cfg) {
    if (cfg.sphere_level > 0) return cfg.sphere_level;
    return n == 3 ? 16 : 6;
}

// Integral over S^{n-1} (surface measure) of G. `side` restricts to the
// hemisphere <w, axis> > 0 (side = 1) or < 0 (side = -1).
DirectionIntegral integrate_directions(int n, const std::function<double(const Point&)>& G,
                                       const std::vector<double>& breaks, const MeasureConfig& cfg,
                                       const Point& axis, int side) {
    DirectionIntegral out;
    if (n == 2) {
        double lo = -kPi;
        double hi = kPi;
        if (side != 0) {
            const double a = std::atan2(axis(1), axis(0));
            lo = side > 0 ? a - 0.5 * kPi : a + 0.5 * kPi;
            hi = lo + kPi;
        }
        std::vector<double> cuts;
        for (double t : breaks) cuts.push_back(wrap_angle(t, lo));
        const QuadResult q =
            integrate([&G](double t) { return G(polar_direction(t)); }, lo, hi, cuts, cfg.angular);
        out.value = q.value;
        out.error = q.error;
        out.nodes = q.evaluations;
        out.converged = q.converged;
        return out;
    }

    const double area = unit_sphere_area(n);
    int m = sphere_level(n, cfg);
    double prev = 0.0;
    for (int level = 0; level <= cfg.sphere_doublings; ++level, m *= 2) {
        const SphereRule rule(n, m, axis);
        std::vector<double> vals(rule.size(), 0.0);
        parallel_for(rule.size(), [&](std::size_t i) {
            const Point& w = rule.direction(i);
            if (side != 0 && (w.dot(axis) > 0) != (side > 0)) return;
            vals[i] = rule.weight(i) * G(w);
        });
        double sum = 0.0;
        for (double v : vals) sum += v;
        sum *= area;
        out.nodes += static_cast<long>(rule.size());
        if (level > 0) {
            out.error = std::abs(sum - prev);
            out.value = sum;
            if (out.error <= cfg.sphere_rel_tol * std::abs(sum)) return out;
        }
        prev = sum;
        out.value = sum;
    }
    out.converged = false;
    return out;
}

MeasureResult finish(const DirectionIntegral& d, const char* what, const MeasureConfig& cfg) {
    if (!d.converged && cfg.strict) {
        std::ostringstream msg;
        msg << what << ": tolerance unmet after maximum refinement (estimate " << d.value
            << ", error " << d.error << ")";
        throw ToleranceError(msg.str(), d.value, d.error);
    }
    MeasureResult r;
    r.value = d.value;
    r.error = d.error;
    r.nodes = d.nodes;
    return r;
}

MeasureResult sum_parts(const std::vector<DirectionIntegral>& parts, const char* what,
                        const MeasureConfig& cfg) {
    DirectionIntegral total;
    for (const auto& p : parts) {
        total.value += p.value;
        total.error += p.error;
        total.nodes += p.nodes;
        total.converged = total.converged && p.converged;
    }
    return finish(total, what, cfg);
}

DirectionIntegral part_volume(const StarRegion& part, const ScalarDensity& f,
                              const MeasureConfig& cfg, const Point& axis, int side) {
    const int n = part.dimension();
    const Point& c = part.star_centre();
    auto G = [&](const Point& w) {
        const double rho = part.exit_distance(w);
        thread_local std::vector<double> kinks;
        ray_kinks(c, w, f.kink_radii, rho, kinks);
        auto radial = [&](double s) { return f.evaluate(c + s * w) * std::pow(s, n - 1); };
        return integrate(radial, 0.0, rho, kinks, cfg.radial).value;
    };
    std::vector<double> breaks;
    if (n == 2) {
        breaks = part.seam_angles();
        for (double t : crossing_angles(part, f.kink_radii)) breaks.push_back(t);
        for (double t : tangent_angles(c, f.kink_radii)) breaks.push_back(t);
    }
    return integrate_directions(n, G, breaks, cfg, axis, side);
}

DirectionIntegral part_boundary(const StarRegion& part,
                                const std::function<double(const Point&, const Point&)>& g,
                                const std::vector<double>& kinks, int piece,
                                const MeasureConfig& cfg, const Point& axis, int side) {
    const int n = part.dimension();
    const Point& c = part.star_centre();
    auto G = [&](const Point& w) {
        const BoundarySample b = part.boundary(w);
        if (piece >= 0 && b.piece != piece) return 0.0;
        const double cosine = w.dot(b.normal);
        if (!(cosine > 1e-12)) {
            std::ostringstream msg;
            msg << "degenerate boundary normal at (";
            for (int i = 0; i < b.point.size(); ++i) msg << (i ? ", " : "") << b.point(i);
            msg << ")";
            throw GeometryError(msg.str());
        }
        const double rho = (b.point - c).norm();
        return g(b.point, b.normal) * std::pow(rho, n - 1) / cosine;
    };
    std::vector<double> breaks;
    if (n == 2) {
        breaks = part.seam_angles();
        for (double t : crossing_angles(part, kinks)) breaks.push_back(t);
    }
    return integrate_directions(n, G, breaks, cfg, axis, side);
}

Point default_axis(int n) { return unit_vector(n, 0); }

}  // namespace

std::string to_string(MeasureMethod m) {
    switch (m) {
        case MeasureMethod::product_quadrature: return "product_quadrature";
        case MeasureMethod::slicing_1d: return "slicing_1d";
        case MeasureMethod::monte_carlo: return "monte_carlo";
    }
    return "?";
}

MeasureResult weighted_volume(const Shape& shape, const ScalarDensity& f, const MeasureConfig& cfg) {
    const auto& parts = shape.parts();
    std::vector<DirectionIntegral> vals(parts.size());
    const Point axis = default_axis(shape.dimension());
    parallel_for(parts.size(), [&](std::size_t i) { vals[i] = part_volume(*parts[i], f, cfg, axis, 0); });
    return sum_parts(vals, "weighted_volume", cfg);
}

MeasureResult boundary_integral(const Shape& shape,
                                const std::function<double(const Point&, const Point&)>& g,
                                const std::vector<double>& kinks, const std::string& piece,
                                const MeasureConfig& cfg) {
    const auto& parts = shape.parts();
    std::vector<int> local(parts.size(), -1);
    std::vector<bool> active(parts.size(), true);
    if (!piece.empty()) {
        bool found = false;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const auto names = parts[i]->piece_names();
            active[i] = false;
            for (std::size_t k = 0; k < names.size(); ++k) {
                const std::string full =
                    parts.size() > 1 ? "part" + std::to_string(i) + "." + names[k] : names[k];
                if (full == piece || (parts.size() > 1 && names[k] == piece)) {
                    local[i] = static_cast<int>(k);
                    active[i] = true;
                    found = true;
                }
            }
        }
        if (!found) throw DomainError("shape has no boundary piece named '" + piece + "'");
    }
    std::vector<DirectionIntegral> vals(parts.size());
    const Point axis = default_axis(shape.dimension());
    parallel_for(parts.size(), [&](std::size_t i) {
        if (active[i]) vals[i] = part_boundary(*parts[i], g, kinks, local[i], cfg, axis, 0);
    });
    return sum_parts(vals, "boundary_integral", cfg);
}

MeasureResult weighted_perimeter(const Shape& shape, const AnisotropicDensity& h,
                                 const MeasureConfig& cfg) {
    return boundary_integral(shape, h.evaluate, h.kink_radii, "", cfg);
}

std::map<std::string, MeasureResult> boundary_piece_measures(const Shape& shape,
                                                             const AnisotropicDensity& h,
                                                             const MeasureConfig& cfg) {
    std::map<std::string, MeasureResult> out;
    for (const auto& name : shape.piece_names()) {
        out[name] = boundary_integral(shape, h.evaluate, h.kink_radii, name, cfg);
    }
    return out;
}

MeasureResult half_boundary_measure(const HyperplaneSplit& split, int side,
                                    const AnisotropicDensity& h, const MeasureConfig& cfg) {
    if (side != 1 && side != -1) throw DomainError("side must be +1 or -1");
    const auto& part = *split.ball.parts().front();
    return finish(part_boundary(part, h.evaluate, h.kink_radii, -1, cfg, split.plane_normal, side),
                  "half_boundary_measure", cfg);
}

MeasureResult half_volume(const HyperplaneSplit& split, int side, const ScalarDensity& f,
                          const MeasureConfig& cfg) {
    if (side != 1 && side != -1) throw DomainError("side must be +1 or -1");
    const auto& part = *split.ball.parts().front();
    return finish(part_volume(part, f, cfg, split.plane_normal, side), "half_volume", cfg);
}

MeasureResult monte_carlo_volume(const Shape& shape, const ScalarDensity& f, long samples,
                                 std::uint64_t seed) {
    if (samples < 2) throw DomainError("monte_carlo_volume needs at least two samples");
    const int n = shape.dimension();
    Point lo = Point::Constant(n, 1e300);
    Point hi = Point::Constant(n, -1e300);
    for (const auto& part : shape.parts()) {
        const Point b = Point::Constant(n, part->bounding_radius());
        lo = lo.cwiseMin(part->star_centre() - b);
        hi = hi.cwiseMax(part->star_centre() + b);
    }
    double box = 1.0;
    for (int i = 0; i < n; ++i) box *= hi(i) - lo(i);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double sum = 0.0;
    double sum2 = 0.0;
    Point x(n);
    for (long k = 0; k < samples; ++k) {
        for (int i = 0; i < n; ++i) x(i) = lo(i) + (hi(i) - lo(i)) * unit(rng);
        const double v = shape.contains(x) ? f.evaluate(x) : 0.0;
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / samples;
    const double var = std::max(sum2 / samples - mean * mean, 0.0);
    MeasureResult r;
    r.value = box * mean;
    r.error = box * std::sqrt(var / (samples - 1));
    r.method = MeasureMethod::monte_carlo;
    r.nodes = samples;
    r.seed = seed;
    return r;
}

double mean_density_from(double perimeter, double volume, int n) {
    if (!(volume > 0)) throw GeometryError("mean density of a shape with zero weighted volume");
    const double base = perimeter / (n * std::pow(volume, (n - 1.0) / n));
    return std::pow(base, n) / unit_ball_volume(n);
}

double mean_density(const Shape& shape, const ScalarDensity& f, const AnisotropicDensity& h, int n,
                    const MeasureConfig& cfg) {
    if (shape.dimension() != n) throw DomainError("mean_density: dimension mismatch");
    const double V = weighted_volume(shape, f, cfg).value;
    const double P = weighted_perimeter(shape, h, cfg).value;
    return mean_density_from(P, V, n);
}

}  // namespace isolab
