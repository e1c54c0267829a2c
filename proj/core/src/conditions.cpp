#include <algorithm>
#include <cfloat>
#include <limits>
#include <sstream>

#include "isolab/densities.hpp"
#include "isolab/parallel.hpp"

namespace isolab {

namespace {

// Values of one field on every annulus sample, row per radius.
struct SampleTable {
    std::vector<double> radii;
    std::vector<std::vector<double>> rows;
};

SampleTable sample_annulus(const Annulus& annulus, int n, bool radial,
                           const std::function<double(const Point&)>& g) {
    SampleTable table;
    table.radii = annulus.radii();
    const auto dirs = direction_mesh(n, radial ? 1 : annulus.angular_samples);
    table.rows.resize(table.radii.size());
    parallel_for(table.radii.size(), [&](std::size_t i) {
        auto& row = table.rows[i];
        row.reserve(dirs.size());
        for (const auto& d : dirs) {
            const double v = g(table.radii[i] * d);
            if (!std::isfinite(v)) {
                throw EvaluationError("non-finite density value at radius " +
                                      std::to_string(table.radii[i]));
            }
            row.push_back(v);
        }
    });
    return table;
}

}  // namespace

std::string to_string(ConvergenceClass c) {
    switch (c) {
        case ConvergenceClass::from_below: return "from_below";
        case ConvergenceClass::from_above: return "from_above";
        case ConvergenceClass::exact: return "exact";
        case ConvergenceClass::mixed: return "mixed";
        case ConvergenceClass::not_converging: return "not_converging";
    }
    return "?";
}

std::string to_string(Confidence c) { return c == Confidence::high ? "high" : "low"; }

std::string to_string(HypothesisVerdict v) {
    switch (v) {
        case HypothesisVerdict::below_case_holds: return "below_case_holds";
        case HypothesisVerdict::above_case_holds: return "above_case_holds";
        case HypothesisVerdict::trivially_exists: return "trivially_exists";
        case HypothesisVerdict::inconclusive: return "inconclusive";
        case HypothesisVerdict::fails: return "fails";
    }
    return "?";
}

void Annulus::validate() const {
    if (!(inner_radius > 0)) throw DomainError("annulus inner radius must be positive");
    if (!(outer_radius > inner_radius)) throw DomainError("annulus needs outer > inner radius");
    if (radial_samples < 4 || angular_samples < 4) {
        throw DomainError("annulus sample counts must be at least 4");
    }
}

std::vector<double> Annulus::radii() const {
    validate();
    std::vector<double> out(radial_samples);
    const double q = std::log(outer_radius / inner_radius) / (radial_samples - 1);
    for (int i = 0; i < radial_samples; ++i) out[i] = inner_radius * std::exp(q * i);
    out.back() = outer_radius;
    return out;
}

ConvergenceResult classify_convergence(const ScalarDensity& g, int n, const Annulus& annulus,
                                       double tol) {
    annulus.validate();
    ConvergenceResult out;

    // Closed-form deviations keep their sign however small they get, so any
    // nonzero value counts. Subtracted ones are trusted only above tol.
    const bool exact = g.has_exact_deviation();
    SampleTable table;
    if (g.limit_at_infinity) {
        out.limit = *g.limit_at_infinity;
        table = sample_annulus(annulus, n, g.is_radial(),
                               [&g](const Point& x) { return g.deviation_at(x); });
    } else {
        table = sample_annulus(annulus, n, g.is_radial(), g.evaluate);
        const auto& last = table.rows.back();
        double mean = 0.0;
        for (double v : last) mean += v;
        mean /= static_cast<double>(last.size());
        double spread = 0.0;
        for (const auto& row : table.rows) {
            for (double v : row) spread = std::max(spread, std::abs(v - mean));
        }
        if (spread <= tol) {
            throw InconclusiveError("limit unknown and samples flat on the annulus");
        }
        out.limit = mean;
        for (auto& row : table.rows) {
            for (double& v : row) v -= mean;
        }
    }
    const double sign_floor = exact ? 0.0 : tol;

    std::vector<double> envelope;
    for (const auto& row : table.rows) {
        double e = 0.0;
        for (double d : row) {
            out.max_excess = std::max(out.max_excess, d);
            out.max_deficit = std::max(out.max_deficit, -d);
            e = std::max(e, std::abs(d));
        }
        envelope.push_back(e);
    }
    out.inner_envelope = envelope.front();
    out.outer_envelope = envelope.back();

    const bool above = out.max_excess > sign_floor;
    const bool below = out.max_deficit > sign_floor;
    if (!above && !below) {
        out.cls = ConvergenceClass::exact;
        return out;
    }
    if (above && below) {
        out.cls = ConvergenceClass::mixed;
        return out;
    }
    bool monotone = true;
    for (std::size_t i = 1; i < envelope.size(); ++i) {
        if (envelope[i] > envelope[i - 1] * (1.0 + 1e-9) + sign_floor) monotone = false;
    }
    const bool decays =
        out.outer_envelope <= tol || (monotone && out.outer_envelope <= 0.5 * out.inner_envelope);
    if (!decays) {
        out.cls = ConvergenceClass::not_converging;
        return out;
    }
    out.cls = above ? ConvergenceClass::from_above : ConvergenceClass::from_below;
    return out;
}

RatioResult ratio_condition(const ScalarDensity& f_dev, const ScalarDensity& h_dev,
                            const Annulus& annulus, int n) {
    if (n < 2) throw DomainError("ratio_condition: dimension must be at least 2");
    RatioResult out;
    out.threshold = static_cast<double>(n) / (n - 1);
    const double floor =
        f_dev.has_exact_deviation() && h_dev.has_exact_deviation() ? DBL_MIN : 1e-14;

    const bool radial = f_dev.is_radial() && h_dev.is_radial();
    const auto ft = sample_annulus(annulus, n, radial, f_dev.evaluate);
    const auto ht = sample_annulus(annulus, n, radial, h_dev.evaluate);

    const double inf = std::numeric_limits<double>::infinity();
    double lo = inf;
    double hi = 0.0;
    int unbounded = 0;
    for (std::size_t i = 0; i < ft.rows.size(); ++i) {
        for (std::size_t j = 0; j < ft.rows[i].size(); ++j) {
            const double a = std::abs(ft.rows[i][j]);
            const double b = std::abs(ht.rows[i][j]);
            if (a < floor && b < floor) continue;
            if (b < floor) {
                ++unbounded;
                continue;
            }
            const double r = a / b;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
            ++out.informative_samples;
        }
    }
    if (out.informative_samples == 0 && unbounded > 0) {
        throw DegenerateRatioError("h~ vanishes on the annulus while f~ does not");
    }
    if (out.informative_samples == 0) {
        // Both fields vanish: f~ <= C h~ for every C >= 0, f~ >= C h~ for every C.
        out.below_constant = 0.0;
        out.above_constant = inf;
        return out;
    }
    out.below_constant = unbounded > 0 ? inf : hi;
    out.above_constant = lo;
    return out;
}

TailVerdict tail_integral_diverges(const RadialProfile& g_r, double R, const TailConfig& cfg) {
    if (!(R > 0)) throw DomainError("tail_integral_diverges: R must be positive");
    if (cfg.samples < 8) throw DomainError("tail_integral_diverges: need at least 8 samples");
    TailVerdict out;

    const int m = cfg.samples;
    const double q = std::log(cfg.outer_factor) / (m - 1);
    std::vector<double> t(m);
    std::vector<double> v(m);
    for (int i = 0; i < m; ++i) {
        t[i] = R * std::exp(q * i);
        v[i] = g_r(t[i]);
        if (!std::isfinite(v[i]) || v[i] < 0) {
            throw EvaluationError("tail_integral_diverges: invalid sample at t = " +
                                  std::to_string(t[i]));
        }
    }

    // Log-log regression over the positive samples.
    std::vector<double> lx;
    std::vector<double> ly;
    for (int i = 0; i < m; ++i) {
        if (v[i] > 0) {
            lx.push_back(std::log(t[i]));
            ly.push_back(std::log(v[i]));
        }
    }
    if (lx.size() < 4) {
        out.fitted_exponent = -std::numeric_limits<double>::infinity();
        return out;
    }
    const double k = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / k;
    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (icpt + slope * lx[i]);
        ss += r * r;
    }
    out.fitted_exponent = slope;
    out.fit_residual = std::sqrt(ss / k);

    int turns = 0;
    for (std::size_t i = 2; i < ly.size(); ++i) {
        const double d1 = ly[i - 1] - ly[i - 2];
        const double d2 = ly[i] - ly[i - 1];
        if (d1 * d2 < 0) ++turns;
    }
    if (out.fit_residual > cfg.residual_limit && turns > static_cast<int>(ly.size()) / 4) {
        std::ostringstream msg;
        msg << "tail samples oscillate (" << turns << " turns, fit residual " << out.fit_residual
            << "); no divergence verdict";
        throw InconclusiveError(msg.str());
    }

    // Block masses: integral of g dt = integral of g t dlog t, trapezoid per
    // interval, grouped into four blocks of consecutive intervals.
    constexpr int kBlocks = 4;
    double blocks[kBlocks] = {0, 0, 0, 0};
    for (int i = 0; i + 1 < m; ++i) {
        const double piece = 0.5 * q * (v[i] * t[i] + v[i + 1] * t[i + 1]);
        blocks[i * kBlocks / (m - 1)] += piece;
    }
    const double total = blocks[0] + blocks[1] + blocks[2] + blocks[3];
    out.partial_ratio = blocks[0] > 0 ? total / blocks[0] : 1.0;

    out.divergent =
        slope >= -1.0 - cfg.eps_fit && out.partial_ratio >= cfg.growth_multiple;
    if (out.fit_residual > cfg.residual_limit || std::abs(slope + 1.0) < cfg.eps_fit) {
        out.confidence = Confidence::low;
    }
    return out;
}

ConditionReport condition_report(const ScalarDensity& f, const AnisotropicDensity& h, int n,
                                 const Annulus& annulus, const ConditionConfig& cfg) {
    annulus.validate();
    ConditionReport rep;
    rep.dimension = n;
    rep.annulus = annulus;
    rep.threshold = static_cast<double>(n) / (n - 1);

    if (!f.limit_at_infinity || !h.limit_at_infinity) {
        rep.verdict = HypothesisVerdict::inconclusive;
        rep.reason = "limit at infinity not declared for f or h+";
        return rep;
    }
    const auto [fn, hn] = normalize(f, h);
    const ScalarDensity hplus = sup_density(hn, cfg.mesh);

    rep.convergence_class_f = classify_convergence(fn, n, annulus, cfg.convergence_tol).cls;
    rep.convergence_class_hplus = classify_convergence(hplus, n, annulus, cfg.convergence_tol).cls;

    {
        const auto ft = sample_annulus(annulus, n, fn.is_radial() && hplus.is_radial(), fn.evaluate);
        const auto ht =
            sample_annulus(annulus, n, fn.is_radial() && hplus.is_radial(), hplus.evaluate);
        double lambda = 0.0;
        for (std::size_t i = 0; i < ft.rows.size(); ++i) {
            for (std::size_t j = 0; j < ft.rows[i].size(); ++j) {
                lambda = std::max(lambda, ht.rows[i][j] / ft.rows[i][j]);
            }
        }
        rep.boundedness_ratio = lambda;
    }

    const auto [ftil, htil] = deviation_fields(fn, hn, cfg.mesh);
    bool ratio_ok = true;
    try {
        const RatioResult ratio = ratio_condition(ftil, htil, annulus, n);
        rep.ratio_min = ratio.above_constant;
        rep.ratio_max = ratio.below_constant;
    } catch (const DegenerateRatioError& e) {
        ratio_ok = false;
        rep.ratio_min = 0.0;
        rep.ratio_max = std::numeric_limits<double>::infinity();
        rep.reason = e.what();
    }

    try {
        const ScalarDensity hr = radial_average(htil, n);
        const TailVerdict tail = tail_integral_diverges(hr.radial, annulus.inner_radius, cfg.tail);
        rep.tail_divergent = tail.divergent;
        rep.tail_confidence = tail.confidence;
        rep.tail_exponent = tail.fitted_exponent;
    } catch (const InconclusiveError&) {
        rep.tail_confidence = Confidence::low;
    }

    const auto cf = rep.convergence_class_f;
    const auto ch = rep.convergence_class_hplus;
    auto set = [&rep](HypothesisVerdict v, std::string why) {
        rep.verdict = v;
        if (rep.reason.empty()) rep.reason = std::move(why);
    };
    if (converges_from_below(cf) && converges_from_below(ch)) {
        if (ratio_ok && rep.ratio_max < rep.threshold) {
            set(HypothesisVerdict::below_case_holds, "f and h+ converge from below, ratio below threshold");
        } else {
            set(HypothesisVerdict::fails, "ratio f~/h~ reaches the threshold n/(n-1)");
        }
    } else if (converges_from_above(cf) && converges_from_above(ch)) {
        if (!ratio_ok || !(rep.ratio_min > rep.threshold)) {
            set(HypothesisVerdict::fails, "ratio f~/h~ does not exceed the threshold n/(n-1)");
        } else if (!rep.tail_divergent) {
            set(HypothesisVerdict::inconclusive, "tail integral verdict unavailable");
        } else if (!*rep.tail_divergent) {
            set(HypothesisVerdict::fails, "tail integral convergent");
        } else {
            set(HypothesisVerdict::above_case_holds,
                "f and h+ converge from above, ratio above threshold, tail divergent");
        }
    } else if (converges_from_above(cf) && converges_from_below(ch)) {
        set(HypothesisVerdict::trivially_exists, "f converges from above and h+ from below");
    } else if (converges_from_below(cf) && converges_from_above(ch)) {
        set(HypothesisVerdict::fails, "f converges from below while h+ converges from above");
    } else {
        set(HypothesisVerdict::inconclusive, "convergence class is " + to_string(cf) + " / " +
                                                 to_string(ch));
    }
    return rep;
}

}  // namespace isolab
