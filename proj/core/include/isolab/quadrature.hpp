#pragma once

#include <functional>
#include <span>
#include <vector>

#include "isolab/common.hpp"

namespace isolab {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// Gauss–Legendre rule with m nodes. Rules are cached per m.
const GaussRule& gauss_legendre(int m);

struct QuadConfig {
    int nodes = 64;
    double rel_tol = 1e-9;
    double abs_tol = 0.0;
    /// Maximum bisection depth per panel. Zero disables refinement: one
    /// panel per break interval and no tolerance check.
    int max_levels = 20;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    long evaluations = 0;
    bool converged = true;
};

/// Adaptive composite Gauss–Legendre on [a, b]. Interior `breaks` (kinks of
/// the integrand) always become panel boundaries. The panel error estimate
/// is |G_m - G_{m/2}|, which is conservative for smooth integrands.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     std::span<const double> breaks, const QuadConfig& cfg);

inline QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                            const QuadConfig& cfg) {
    return integrate(f, a, b, {}, cfg);
}

/// Product rule on S^{n-1} in hyperspherical coordinates about `axis`.
/// Weights are normalised to sum to 1 so that a weighted sum is the mean.
/// The first polar angle is split at pi/2, so hemispheres about `axis` are
/// integrated without a seam inside a panel.
class SphereRule {
public:
    SphereRule(int n, int m, const Point& axis);
    SphereRule(int n, int m) : SphereRule(n, m, unit_vector(n, 0)) {}

    int dimension() const { return n_; }
    std::size_t size() const { return weights_.size(); }
    const Point& direction(std::size_t i) const { return directions_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }

private:
    int n_;
    std::vector<Point> directions_;
    std::vector<double> weights_;
};

/// Orthonormal completion: returns an n x n orthogonal matrix whose first
/// column is `axis` (normalised).
Eigen::MatrixXd frame_with_axis(const Point& axis);

/// Sphere mean of g at a level m and at 2m; error is their difference.
QuadResult sphere_mean(int n, int m, const std::function<double(const Point&)>& g);

struct RootResult {
    double root = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Bracket-preserving root search for a monotone function on [lo, hi]
/// with f(lo) and f(hi) of opposite sign. Illinois false-position steps are
/// safeguarded by bisection whenever the bracket fails to halve.
RootResult bracketed_root(const std::function<double(double)>& f, double lo, double hi,
                          double f_tol, double x_tol, int max_iter = 200);

}  // namespace isolab
