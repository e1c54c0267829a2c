#include "isolab/densities.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>

#include "isolab/quadrature.hpp"

namespace isolab {

namespace {

const std::map<CatalogId, std::string>& catalog_names() {
    static const std::map<CatalogId, std::string> names{
        {CatalogId::constant, "constant"},
        {CatalogId::exp_approach_below, "exp-approach-below"},
        {CatalogId::exp_approach_above, "exp-approach-above"},
        {CatalogId::counterexample_phi, "counterexample-phi"},
        {CatalogId::tabulated_radial, "tabulated-radial"},
        {CatalogId::power_approach_below, "power-approach-below"},
        {CatalogId::power_approach_above, "power-approach-above"},
        {CatalogId::abs_cos_anisotropy, "abs-cos"},
        {CatalogId::fourier_anisotropy, "fourier-anisotropy"},
        {CatalogId::custom, "custom"},
    };
    return names;
}

// Builds a radial density from its profile and its deviation profile.
ScalarDensity make_radial(CatalogId id, std::map<std::string, double> params,
                          RadialProfile profile, RadialProfile dev_profile, double limit,
                          std::vector<double> kinks = {}) {
    ScalarDensity d;
    d.catalog_id = id;
    d.params = std::move(params);
    d.limit_at_infinity = limit;
    d.radial = profile;
    d.radial_deviation = dev_profile;
    d.evaluate = [profile](const Point& x) { return profile(x.norm()); };
    d.deviation = [dev_profile](const Point& x) { return dev_profile(x.norm()); };
    d.kink_radii = std::move(kinks);
    return d;
}

ScalarDensity scaled(const ScalarDensity& g, double c) {
    ScalarDensity d = g;
    auto eval = g.evaluate;
    d.evaluate = [eval, c](const Point& x) { return eval(x) / c; };
    if (g.limit_at_infinity) d.limit_at_infinity = *g.limit_at_infinity / c;
    if (g.radial) {
        auto r = g.radial;
        d.radial = [r, c](double t) { return r(t) / c; };
    }
    if (g.deviation) {
        auto dev = g.deviation;
        d.deviation = [dev, c](const Point& x) { return dev(x) / c; };
    }
    if (g.radial_deviation) {
        auto rd = g.radial_deviation;
        d.radial_deviation = [rd, c](double t) { return rd(t) / c; };
    }
    d.params["normalized_by"] = c;
    return d;
}

void check_finite(double v, const Point& nu) {
    if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "non-finite perimeter density at direction (";
        for (int i = 0; i < nu.size(); ++i) msg << (i ? ", " : "") << nu(i);
        msg << ")";
        throw EvaluationError(msg.str());
    }
}

}  // namespace

std::string to_string(CatalogId id) { return catalog_names().at(id); }

CatalogId catalog_from_string(const std::string& name) {
    for (const auto& [id, text] : catalog_names()) {
        if (text == name) return id;
    }
    throw ConfigError("unknown density kind '" + name + "'");
}

double ScalarDensity::deviation_at(const Point& x) const {
    if (deviation) return deviation(x);
    if (!limit_at_infinity) throw PreconditionError("density has no declared limit at infinity");
    return evaluate(x) - *limit_at_infinity;
}

double AnisotropicDensity::deviation_at(const Point& x, const Point& nu) const {
    if (deviation) return deviation(x, nu);
    if (!limit_at_infinity) throw PreconditionError("density has no declared limit at infinity");
    return evaluate(x, nu) - *limit_at_infinity;
}

bool AnisotropicDensity::is_rotation_invariant() const {
    return isotropic_hint && isotropic_base && isotropic_base->is_radial();
}

// Catalog ---------------------------------------------------------------

ScalarDensity constant_density(double value) {
    if (!(value > 0)) throw DomainError("constant density must be positive");
    return make_radial(CatalogId::constant, {{"value", value}},
                       [value](double) { return value; }, [](double) { return 0.0; }, value);
}

ScalarDensity exp_approach_below(double amplitude, double rate) {
    return make_radial(
        CatalogId::exp_approach_below, {{"amplitude", amplitude}, {"rate", rate}},
        [=](double t) { return 1.0 - amplitude * std::exp(-rate * t); },
        [=](double t) { return -amplitude * std::exp(-rate * t); }, 1.0);
}

ScalarDensity exp_approach_above(double amplitude, double rate) {
    return make_radial(
        CatalogId::exp_approach_above, {{"amplitude", amplitude}, {"rate", rate}},
        [=](double t) { return 1.0 + amplitude * std::exp(-rate * t); },
        [=](double t) { return amplitude * std::exp(-rate * t); }, 1.0);
}

ScalarDensity counterexample_phi(double M, double scale, double offset) {
    if (!(M > 0)) throw DomainError("counterexample parameter M must be positive");
    auto phi = [M](double t) { return M * std::exp(-M * std::max(t - 1.0, 0.0)); };
    return make_radial(
        CatalogId::counterexample_phi, {{"M", M}, {"scale", scale}, {"offset", offset}},
        [=](double t) { return offset + scale * phi(t); },
        [=](double t) { return scale * phi(t); }, offset, {1.0});
}

ScalarDensity power_approach_below(double amplitude, double power) {
    return make_radial(
        CatalogId::power_approach_below, {{"amplitude", amplitude}, {"power", power}},
        [=](double t) { return 1.0 - amplitude * std::pow(std::max(t, 1.0), -power); },
        [=](double t) { return -amplitude * std::pow(std::max(t, 1.0), -power); }, 1.0, {1.0});
}

ScalarDensity power_approach_above(double amplitude, double power) {
    return make_radial(
        CatalogId::power_approach_above, {{"amplitude", amplitude}, {"power", power}},
        [=](double t) { return 1.0 + amplitude * std::pow(std::max(t, 1.0), -power); },
        [=](double t) { return amplitude * std::pow(std::max(t, 1.0), -power); }, 1.0, {1.0});
}

ScalarDensity tabulated_radial(std::vector<std::pair<double, double>> rows,
                               std::function<void(const std::string&)> warn) {
    if (rows.size() < 2) throw ConfigError("tabulated-radial needs at least two rows");
    std::sort(rows.begin(), rows.end());
    for (const auto& [r, v] : rows) {
        if (!(v > 0)) throw ConfigError("tabulated-radial values must be positive");
        if (r < 0) throw ConfigError("tabulated-radial radii must be nonnegative");
    }
    auto table = std::make_shared<const std::vector<std::pair<double, double>>>(rows);
    auto warned = std::make_shared<std::atomic<bool>>(false);
    const double last = rows.back().second;
    auto profile = [table, warned, warn](double t) {
        const auto& tab = *table;
        if (t <= tab.front().first) return tab.front().second;
        if (t >= tab.back().first) {
            if (t > tab.back().first && warn && !warned->exchange(true)) {
                warn("tabulated-radial density extrapolated beyond r = " +
                     std::to_string(tab.back().first));
            }
            return tab.back().second;
        }
        auto it = std::upper_bound(tab.begin(), tab.end(), std::pair{t, -1e300});
        const auto& [r1, v1] = *it;
        const auto& [r0, v0] = *(it - 1);
        const double w = (t - r0) / (r1 - r0);
        return v0 + w * (v1 - v0);
    };
    std::vector<double> kinks;
    for (const auto& row : rows) kinks.push_back(row.first);
    auto dev = [profile, last](double t) { return profile(t) - last; };
    ScalarDensity d = make_radial(CatalogId::tabulated_radial,
                                  {{"rows", static_cast<double>(rows.size())}}, profile, dev,
                                  last, kinks);
    // Subtraction-based: no closed form beyond the table.
    d.deviation = nullptr;
    return d;
}

ScalarDensity tabulated_radial_from_csv(const std::string& path,
                                        std::function<void(const std::string&)> warn) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open tabulated density file '" + path + "'");
    std::vector<std::pair<double, double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double r = 0;
        double v = 0;
        if (!(fields >> r >> v)) {
            if (rows.empty()) continue;  // header row
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 'radius,value'");
        }
        rows.emplace_back(r, v);
    }
    return tabulated_radial(std::move(rows), std::move(warn));
}

ScalarDensity custom_density(std::function<double(const Point&)> evaluate,
                             std::optional<double> limit) {
    ScalarDensity d;
    d.evaluate = std::move(evaluate);
    d.limit_at_infinity = limit;
    return d;
}

AnisotropicDensity isotropic(const ScalarDensity& g) {
    AnisotropicDensity h;
    auto eval = g.evaluate;
    h.evaluate = [eval](const Point& x, const Point&) { return eval(x); };
    h.isotropic_hint = true;
    h.catalog_id = g.catalog_id;
    h.params = g.params;
    h.limit_at_infinity = g.limit_at_infinity;
    h.exact_sup = eval;
    if (g.deviation) {
        auto dev = g.deviation;
        h.sup_deviation = dev;
        h.deviation = [dev](const Point& x, const Point&) { return dev(x); };
    }
    h.isotropic_base = g;
    h.sup_radial = g.radial;
    h.sup_radial_deviation = g.radial_deviation;
    h.kink_radii = g.kink_radii;
    return h;
}

AnisotropicDensity abs_cos_anisotropy(const ScalarDensity& a, const ScalarDensity& b,
                                      const Point& axis) {
    if (!a.limit_at_infinity || !b.limit_at_infinity) {
        throw PreconditionError("abs-cos anisotropy needs declared limits for a and b");
    }
    const Point e = axis.normalized();
    const double la = *a.limit_at_infinity;
    const double lb = *b.limit_at_infinity;
    AnisotropicDensity h;
    h.catalog_id = CatalogId::abs_cos_anisotropy;
    h.params = {{"a_limit", la}, {"b_limit", lb}};
    auto ea = a.evaluate;
    auto eb = b.evaluate;
    h.evaluate = [ea, eb, e](const Point& x, const Point& nu) {
        return ea(x) + eb(x) * std::abs(nu.dot(e));
    };
    h.exact_sup = [ea, eb](const Point& x) { return ea(x) + eb(x); };
    h.limit_at_infinity = la + lb;
    h.sup_deviation = [a, b](const Point& x) { return a.deviation_at(x) + b.deviation_at(x); };
    h.deviation = [a, b, e, lb](const Point& x, const Point& nu) {
        const double c = std::abs(nu.dot(e));
        return a.deviation_at(x) + b.deviation_at(x) * c + lb * (c - 1.0);
    };
    if (a.radial && b.radial) {
        auto ra = a.radial;
        auto rb = b.radial;
        h.sup_radial = [ra, rb](double t) { return ra(t) + rb(t); };
        if (a.radial_deviation && b.radial_deviation) {
            auto da = a.radial_deviation;
            auto db = b.radial_deviation;
            h.sup_radial_deviation = [da, db](double t) { return da(t) + db(t); };
        }
    }
    h.kink_radii = a.kink_radii;
    h.kink_radii.insert(h.kink_radii.end(), b.kink_radii.begin(), b.kink_radii.end());
    return h;
}

AnisotropicDensity fourier_anisotropy(const ScalarDensity& g, std::vector<double> cos_terms,
                                      std::vector<double> sin_terms) {
    auto profile = [cos_terms, sin_terms](double psi) {
        double v = 1.0;
        for (std::size_t k = 0; k < cos_terms.size(); ++k) v += cos_terms[k] * std::cos((k + 1) * psi);
        for (std::size_t k = 0; k < sin_terms.size(); ++k) v += sin_terms[k] * std::sin((k + 1) * psi);
        return v;
    };
    double lo = 1e300;
    double hi = -1e300;
    for (int i = 0; i < 20000; ++i) {
        const double v = profile(2.0 * kPi * i / 20000);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(lo > 0)) throw DomainError("fourier anisotropy must stay positive");
    AnisotropicDensity h;
    h.catalog_id = CatalogId::fourier_anisotropy;
    for (std::size_t k = 0; k < cos_terms.size(); ++k) h.params["c" + std::to_string(k + 1)] = cos_terms[k];
    for (std::size_t k = 0; k < sin_terms.size(); ++k) h.params["s" + std::to_string(k + 1)] = sin_terms[k];
    auto eval = g.evaluate;
    h.evaluate = [eval, profile](const Point& x, const Point& nu) {
        if (nu.size() != 2) throw DomainError("fourier anisotropy is planar");
        return eval(x) * profile(std::atan2(nu(1), nu(0)));
    };
    if (g.limit_at_infinity) h.limit_at_infinity = *g.limit_at_infinity * hi;
    h.kink_radii = g.kink_radii;
    return h;
}

std::pair<ScalarDensity, AnisotropicDensity> normalize(const ScalarDensity& f,
                                                       const AnisotropicDensity& h) {
    if (!f.limit_at_infinity || !h.limit_at_infinity) {
        throw PreconditionError("normalization needs declared limits for f and h+");
    }
    const double a = *f.limit_at_infinity;
    const double b = *h.limit_at_infinity;
    ScalarDensity fn = a == 1.0 ? f : scaled(f, a);
    if (b == 1.0) return {fn, h};

    AnisotropicDensity hn = h;
    auto eval = h.evaluate;
    hn.evaluate = [eval, b](const Point& x, const Point& nu) { return eval(x, nu) / b; };
    hn.limit_at_infinity = 1.0;
    if (h.exact_sup) {
        auto s = h.exact_sup;
        hn.exact_sup = [s, b](const Point& x) { return s(x) / b; };
    }
    if (h.sup_deviation) {
        auto s = h.sup_deviation;
        hn.sup_deviation = [s, b](const Point& x) { return s(x) / b; };
    }
    if (h.deviation) {
        auto s = h.deviation;
        hn.deviation = [s, b](const Point& x, const Point& nu) { return s(x, nu) / b; };
    }
    if (h.sup_radial) {
        auto s = h.sup_radial;
        hn.sup_radial = [s, b](double t) { return s(t) / b; };
    }
    if (h.sup_radial_deviation) {
        auto s = h.sup_radial_deviation;
        hn.sup_radial_deviation = [s, b](double t) { return s(t) / b; };
    }
    if (h.isotropic_base) hn.isotropic_base = scaled(*h.isotropic_base, b);
    hn.params["normalized_by"] = b;
    return {fn, hn};
}

// Directions ------------------------------------------------------------

std::vector<Point> direction_mesh(int n, int count) {
    std::vector<Point> out;
    out.reserve(count);
    if (n == 2) {
        for (int i = 0; i < count; ++i) out.push_back(polar_direction(2.0 * kPi * i / count));
    } else if (n == 3) {
        const double golden = kPi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < count; ++i) {
            const double z = 1.0 - (2.0 * i + 1.0) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            Point d(3);
            d << r * std::cos(golden * i), r * std::sin(golden * i), z;
            out.push_back(d);
        }
    } else {
        std::mt19937_64 rng(0x5eed5eedULL + n);
        std::normal_distribution<double> normal;
        for (int i = 0; i < count; ++i) {
            Point d(n);
            for (int k = 0; k < n; ++k) d(k) = normal(rng);
            out.push_back(d.normalized());
        }
    }
    return out;
}

double sup_over_directions(const AnisotropicDensity& h, const Point& x,
                           const DirectionMeshConfig& cfg) {
    const int n = static_cast<int>(x.size());
    if (!x.allFinite()) throw DomainError("sup_over_directions: non-finite point");
    if (h.exact_sup) {
        const double v = h.exact_sup(x);
        check_finite(v, unit_vector(n, 0));
        return v;
    }
    const int count = n == 2 ? cfg.directions_2d : cfg.directions_3d;
    const auto mesh = direction_mesh(n, count);
    double best = -1e300;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const double v = h.evaluate(x, mesh[i]);
        check_finite(v, mesh[i]);
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    if (!cfg.refine) return best;

    if (n == 2) {
        const double step = 2.0 * kPi / count;
        const double centre = 2.0 * kPi * best_i / count;
        auto value = [&](double psi) { return h.evaluate(x, polar_direction(psi)); };
        double a = centre - step;
        double b = centre + step;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - g * (b - a);
        double d = a + g * (b - a);
        double fc = value(c);
        double fd = value(d);
        for (int it = 0; it < 80 && (b - a) > 1e-15; ++it) {
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = value(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = value(d);
            }
        }
        return std::max({best, fc, fd});
    }

    // Pattern search on the sphere around the best mesh direction.
    Point dir = mesh[best_i];
    double step = std::sqrt(4.0 * kPi / count);
    const Eigen::MatrixXd frame = frame_with_axis(dir);
    while (step > 1e-12) {
        bool moved = false;
        for (int k = 1; k < n; ++k) {
            for (double sgn : {1.0, -1.0}) {
                const Point trial = (dir + sgn * step * frame.col(k)).normalized();
                const double v = h.evaluate(x, trial);
                check_finite(v, trial);
                if (v > best) {
                    best = v;
                    dir = trial;
                    moved = true;
                }
            }
        }
        if (!moved) step *= 0.5;
    }
    return best;
}

ScalarDensity sup_density(const AnisotropicDensity& h, const DirectionMeshConfig& cfg) {
    ScalarDensity d;
    d.catalog_id = h.catalog_id;
    d.params = h.params;
    d.limit_at_infinity = h.limit_at_infinity;
    d.evaluate = [h, cfg](const Point& x) { return sup_over_directions(h, x, cfg); };
    d.deviation = h.sup_deviation;
    d.radial = h.sup_radial;
    d.radial_deviation = h.sup_radial_deviation;
    d.kink_radii = h.kink_radii;
    return d;
}

std::pair<ScalarDensity, ScalarDensity> deviation_fields(const ScalarDensity& f,
                                                         const AnisotropicDensity& h,
                                                         const DirectionMeshConfig& cfg) {
    auto check_limit = [](const std::optional<double>& limit, const char* name) {
        if (limit && std::abs(*limit - 1.0) > 1e-12) {
            throw PreconditionError(std::string("deviation_fields: limit of ") + name +
                                    " is not 1; normalize first");
        }
    };
    check_limit(f.limit_at_infinity, "f");
    check_limit(h.limit_at_infinity, "h+");

    auto absolute = [](const ScalarDensity& g) {
        ScalarDensity d;
        d.catalog_id = CatalogId::custom;
        d.params = g.params;
        d.limit_at_infinity = 0.0;
        const bool exact = g.has_exact_deviation();
        d.evaluate = [g](const Point& x) {
            if (g.deviation) return std::abs(g.deviation(x));
            return std::abs(g.evaluate(x) - g.limit_at_infinity.value_or(1.0));
        };
        if (exact) d.deviation = d.evaluate;
        if (g.radial) {
            auto rd = g.radial_deviation;
            auto r = g.radial;
            const double lim = g.limit_at_infinity.value_or(1.0);
            d.radial = rd ? RadialProfile([rd](double t) { return std::abs(rd(t)); })
                          : RadialProfile([r, lim](double t) { return std::abs(r(t) - lim); });
            if (exact) d.radial_deviation = d.radial;
        }
        d.kink_radii = g.kink_radii;
        return d;
    };
    return {absolute(f), absolute(sup_density(h, cfg))};
}

namespace {

// Lazily built sphere rules shared by the closures of one radial average.
class RuleLadder {
public:
    RuleLadder(int n, int m, int levels) : n_(n), m_(m), rules_(levels + 2) {}
    const SphereRule& at(int level) {
        std::lock_guard lock(mutex_);
        auto& slot = rules_.at(level);
        if (!slot) slot = std::make_unique<SphereRule>(n_, m_ << level);
        return *slot;
    }
    int levels() const { return static_cast<int>(rules_.size()) - 1; }

private:
    int n_;
    int m_;
    std::mutex mutex_;
    std::vector<std::unique_ptr<SphereRule>> rules_;
};

double ladder_mean(RuleLadder& ladder, const std::function<double(const Point&)>& g, double t,
                   double rel_tol) {
    auto mean_at = [&](int level) {
        const SphereRule& rule = ladder.at(level);
        double sum = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weight(i) * g(t * rule.direction(i));
        return sum;
    };
    double prev = mean_at(0);
    double diff = 0.0;
    for (int level = 1; level <= ladder.levels(); ++level) {
        const double cur = mean_at(level);
        diff = std::abs(cur - prev);
        if (diff <= rel_tol * std::abs(cur) || diff == 0.0) return cur;
        prev = cur;
    }
    throw ToleranceError("radial_average: sphere quadrature did not converge at t = " +
                             std::to_string(t),
                         prev, diff / std::max(std::abs(prev), 1e-300));
}

}  // namespace

ScalarDensity radial_average(const ScalarDensity& g, int n, const RadialAverageConfig& cfg) {
    if (g.is_radial()) return g;
    auto ladder = std::make_shared<RuleLadder>(n, cfg.initial_nodes, cfg.max_doublings);
    const double tol = cfg.rel_tol;
    ScalarDensity d;
    d.catalog_id = CatalogId::custom;
    d.params = g.params;
    d.params["radially_averaged"] = 1.0;
    d.limit_at_infinity = g.limit_at_infinity;
    auto eval = g.evaluate;
    d.radial = [ladder, eval, tol](double t) { return ladder_mean(*ladder, eval, std::abs(t), tol); };
    auto profile = d.radial;
    d.evaluate = [profile](const Point& x) { return profile(x.norm()); };
    if (g.deviation) {
        auto dev = g.deviation;
        d.radial_deviation = [ladder, dev, tol](double t) {
            return ladder_mean(*ladder, dev, std::abs(t), tol);
        };
        auto rdev = d.radial_deviation;
        d.deviation = [rdev](const Point& x) { return rdev(x.norm()); };
    }
    d.kink_radii = g.kink_radii;
    return d;
}

}  // namespace isolab
