#include <cmath>
#include <limits>

#include "isolab/constructions.hpp"
#include "isolab/parallel.hpp"

namespace isolab {

double circle_mean(const std::function<double(const Point&)>& gap, const Point& u, const Point& v,
                   int samples) {
    if (samples < 4) throw DomainError("circle_mean: need at least 4 samples");
    double sum = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double a = 2.0 * kPi * i / samples;
        sum += gap(std::cos(a) * u + std::sin(a) * v);
    }
    return sum / samples;
}

namespace {

// Mean of gap over the unit sphere of the subspace spanned by the columns of Q.
double subsphere_mean(const std::function<double(const Point&)>& gap, const Eigen::MatrixXd& Q,
                      const DescentConfig& cfg) {
    const int k = static_cast<int>(Q.cols());
    if (k == 2) return circle_mean(gap, Q.col(0), Q.col(1), cfg.mesh_k1);
    const SphereRule rule(k, cfg.sphere_level);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        sum += rule.weight(i) * gap(Q * rule.direction(i));
    }
    return sum;
}

}  // namespace

Circle sphere_descent(const std::function<double(const Point&)>& gap, int n,
                      const DescentConfig& cfg) {
    if (n < 2) throw DomainError("sphere_descent: dimension must be at least 2");
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n);
    double mean = subsphere_mean(gap, Q, cfg);
    if (mean < 0) {
        throw DescentError("sphere_descent: the mean gap over the sphere is negative (" +
                           std::to_string(mean) + ")");
    }
    // Q spans a sphere of dimension k = cols - 1; drop one direction at a time.
    while (Q.cols() > 2) {
        const int k1 = static_cast<int>(Q.cols());
        const auto candidates = direction_mesh(k1, k1 == 3 ? cfg.mesh_k2 : cfg.mesh_higher);
        std::vector<double> means(candidates.size());
        std::vector<Eigen::MatrixXd> bases(candidates.size());
        parallel_for(candidates.size(), [&](std::size_t i) {
            const Eigen::MatrixXd F = frame_with_axis(candidates[i]);
            bases[i] = Q * F.rightCols(k1 - 1);
            means[i] = subsphere_mean(gap, bases[i], cfg);
        });
        std::size_t best = 0;
        for (std::size_t i = 1; i < means.size(); ++i) {
            if (means[i] > means[best]) best = i;
        }
        if (!(means[best] >= 0)) {
            throw DescentError("sphere_descent: no subsphere of dimension " +
                               std::to_string(k1 - 2) + " keeps a nonnegative mean gap (best " +
                               std::to_string(means[best]) + ")");
        }
        Q = bases[best];
        mean = means[best];
    }
    return Circle{Q.col(0), Q.col(1), mean};
}

double mass_extinction_time(double m0, double c, int n) {
    if (!(m0 >= 0) || !(c > 0) || n < 2) throw DomainError("mass_extinction_time: need m0 >= 0, c > 0, n >= 2");
    return 4.0 * n * std::pow(m0, 1.0 / n) / c;
}

DecayTrace integrate_mass_decay(double m0, double c, int n, double dt, double min_step) {
    if (!(m0 >= 0) || !(c > 0) || n < 2 || !(dt > 0) || !(min_step > 0)) {
        throw DomainError("integrate_mass_decay: invalid arguments");
    }
    const double p = (n - 1.0) / n;
    auto rhs = [&](double m) { return -0.25 * c * std::pow(m, p); };

    // One RK4 step; false when a stage would leave m >= 0.
    auto step = [&](double m, double h, double& next) {
        const double k1 = rhs(m);
        const double m2 = m + 0.5 * h * k1;
        if (m2 < 0) return false;
        const double k2 = rhs(m2);
        const double m3 = m + 0.5 * h * k2;
        if (m3 < 0) return false;
        const double k3 = rhs(m3);
        const double m4 = m + h * k3;
        if (m4 < 0) return false;
        next = m + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + rhs(m4));
        return next >= 0;
    };

    DecayTrace out;
    double t = 0.0;
    double m = m0;
    constexpr long kMaxSteps = 100000000;
    constexpr double kFraction = 0.05;  // of the local time scale m / |m'|
    while (m > 0 && out.steps < kMaxSteps) {
        const double scale = m / std::abs(rhs(m));
        if (scale < min_step) break;
        double h = std::min(dt, kFraction * scale);
        double next = 0.0;
        while (h >= min_step && !step(m, h, next)) h *= 0.5;
        if (h < min_step) break;
        m = next;
        t += h;
        ++out.steps;
    }
    out.extinction_time = t;
    return out;
}

}  // namespace isolab
