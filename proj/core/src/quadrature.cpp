#include "isolab/quadrature.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

namespace isolab {

namespace {

GaussRule compute_gauss_legendre(int m) {
    GaussRule rule;
    rule.nodes.resize(m);
    rule.weights.resize(m);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        // Tricomi initial guess, then Newton on P_m.
        double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= m; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (m == 1) p0 = 1.0;
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[m - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[m - 1 - i] = w;
    }
    if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
    return rule;
}

double apply_rule(const GaussRule& rule, const std::function<double(double)>& f, double lo,
                  double hi) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return sum * half;
}

struct Panel {
    double lo;
    double hi;
    int depth;
};

}  // namespace

const GaussRule& gauss_legendre(int m) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<GaussRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[m];
    if (!slot) slot = std::make_unique<GaussRule>(compute_gauss_legendre(m));
    return *slot;
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     std::span<const double> breaks, const QuadConfig& cfg) {
    QuadResult out;
    if (b <= a) return out;

    std::vector<double> cuts{a};
    for (double x : breaks) {
        if (x > a && x < b) cuts.push_back(x);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts.push_back(b);

    const GaussRule& fine = gauss_legendre(cfg.nodes);
    const int m = static_cast<int>(fine.nodes.size());

    if (cfg.max_levels <= 0) {
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            out.value += apply_rule(fine, f, cuts[i], cuts[i + 1]);
            out.evaluations += m;
        }
        return out;
    }

    const GaussRule& coarse = gauss_legendre(std::max(2, cfg.nodes / 2));
    const int mc = static_cast<int>(coarse.nodes.size());

    // First pass fixes the scale that the relative tolerance refers to.
    std::vector<double> fine_vals;
    std::vector<double> coarse_vals;
    double scale = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        fine_vals.push_back(apply_rule(fine, f, cuts[i], cuts[i + 1]));
        coarse_vals.push_back(apply_rule(coarse, f, cuts[i], cuts[i + 1]));
        out.evaluations += m + mc;
        scale += std::abs(fine_vals.back());
    }
    const double budget = std::max(cfg.abs_tol, cfg.rel_tol * scale);
    const double length = b - a;

    std::vector<std::pair<Panel, std::pair<double, double>>> stack;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        stack.push_back({{cuts[i], cuts[i + 1], 0}, {fine_vals[i], coarse_vals[i]}});
    }
    while (!stack.empty()) {
        auto [panel, vals] = stack.back();
        stack.pop_back();
        const double diff = std::abs(vals.first - vals.second);
        const double tol = budget * (panel.hi - panel.lo) / length;
        if (diff <= tol || panel.depth >= cfg.max_levels) {
            if (diff > tol) out.converged = false;
            out.value += vals.first;
            out.error += diff;
            continue;
        }
        const double mid = 0.5 * (panel.lo + panel.hi);
        for (auto [lo, hi] : {std::pair{panel.lo, mid}, std::pair{mid, panel.hi}}) {
            const double vf = apply_rule(fine, f, lo, hi);
            const double vc = apply_rule(coarse, f, lo, hi);
            out.evaluations += m + mc;
            stack.push_back({{lo, hi, panel.depth + 1}, {vf, vc}});
        }
    }
    return out;
}

Eigen::MatrixXd frame_with_axis(const Point& axis) {
    const int n = static_cast<int>(axis.size());
    const Point a = axis.normalized();
    Point v = a - unit_vector(n, 0);
    const double vv = v.squaredNorm();
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n);
    if (vv < 1e-30) return q;
    q -= 2.0 * v * v.transpose() / vv;
    return q;
}

namespace {

// Standard-coordinate rule on S^{n-1} with the pole along e_0.
void build_sphere(int n, int m, std::vector<Point>& dirs, std::vector<double>& weights) {
    if (n == 2) {
        const int k = 2 * m;
        for (int i = 0; i < k; ++i) {
            const double psi = 2.0 * kPi * i / k;
            dirs.push_back(polar_direction(psi));
            weights.push_back(1.0 / k);
        }
        return;
    }
    std::vector<Point> sub_dirs;
    std::vector<double> sub_weights;
    build_sphere(n - 1, m, sub_dirs, sub_weights);

    const GaussRule& rule = gauss_legendre(std::max(2, m / 2));
    std::vector<double> phis;
    std::vector<double> phi_w;
    for (auto [lo, hi] : {std::pair{0.0, kPi / 2}, std::pair{kPi / 2, kPi}}) {
        const double half = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double phi = mid + half * rule.nodes[i];
            phis.push_back(phi);
            phi_w.push_back(rule.weights[i] * half * std::pow(std::sin(phi), n - 2));
        }
    }
    double total = 0.0;
    for (double w : phi_w) total += w;
    for (std::size_t i = 0; i < phis.size(); ++i) {
        const double c = std::cos(phis[i]);
        const double s = std::sin(phis[i]);
        for (std::size_t j = 0; j < sub_dirs.size(); ++j) {
            Point d(n);
            d(0) = c;
            d.tail(n - 1) = s * sub_dirs[j];
            dirs.push_back(std::move(d));
            weights.push_back(phi_w[i] / total * sub_weights[j]);
        }
    }
}

}  // namespace

SphereRule::SphereRule(int n, int m, const Point& axis) : n_(n) {
    if (n < 2) throw DomainError("SphereRule: dimension must be at least 2");
    build_sphere(n, m, directions_, weights_);
    const Eigen::MatrixXd q = frame_with_axis(axis);
    for (auto& d : directions_) d = q * d;
}

QuadResult sphere_mean(int n, int m, const std::function<double(const Point&)>& g) {
    QuadResult out;
    double coarse = 0.0;
    double fine = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        const SphereRule rule(n, pass == 0 ? m : 2 * m);
        double sum = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i) {
            sum += rule.weight(i) * g(rule.direction(i));
        }
        out.evaluations += static_cast<long>(rule.size());
        (pass == 0 ? coarse : fine) = sum;
    }
    out.value = fine;
    out.error = std::abs(fine - coarse);
    return out;
}

RootResult bracketed_root(const std::function<double(double)>& f, double lo, double hi,
                          double f_tol, double x_tol, int max_iter) {
    RootResult out;
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return {lo, 0.0, 0, true};
    if (fhi == 0.0) return {hi, 0.0, 0, true};
    if ((flo > 0) == (fhi > 0)) {
        out.root = std::abs(flo) < std::abs(fhi) ? lo : hi;
        out.residual = std::min(std::abs(flo), std::abs(fhi));
        return out;
    }
    int side = 0;
    double width = hi - lo;
    for (int it = 1; it <= max_iter; ++it) {
        double x = (lo * fhi - hi * flo) / (fhi - flo);
        // Safeguard: fall back to bisection when false position stalls.
        if (!(x > lo && x < hi) || (hi - lo) > 0.5 * width) x = 0.5 * (lo + hi);
        width = hi - lo;
        const double fx = f(x);
        out.root = x;
        out.residual = std::abs(fx);
        out.iterations = it;
        if (std::abs(fx) <= f_tol || (hi - lo) <= x_tol) {
            out.converged = true;
            return out;
        }
        if ((fx > 0) == (fhi > 0)) {
            hi = x;
            fhi = fx;
            if (side == 1) flo *= 0.5;
            side = 1;
        } else {
            lo = x;
            flo = fx;
            if (side == -1) fhi *= 0.5;
            side = -1;
        }
    }
    return out;
}

}  // namespace isolab
