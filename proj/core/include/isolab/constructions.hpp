#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "isolab/densities.hpp"
#include "isolab/measures.hpp"
#include "isolab/shapes.hpp"

namespace isolab {

/// One checked inequality lhs <relation> rhs; slack is rhs - lhs for "<=" and
/// lhs - rhs for ">=", so a satisfied row has slack >= 0.
struct CertificateRow {
    std::string name;
    double lhs = 0.0;
    std::string relation;
    double rhs = 0.0;
    double slack = 0.0;
    bool required = true;
    bool holds() const { return slack >= 0.0; }
};

struct Certificate {
    std::vector<CertificateRow> rows;

    void add(std::string name, double lhs, const std::string& relation, double rhs,
             bool required = true);
    bool all_hold() const;
    /// Smallest slack among required rows.
    double worst_slack() const;
    const CertificateRow* find(const std::string& name) const;
    std::string to_csv() const;
};

/// A construction whose certificate did not close on any candidate.
class CertificateError : public ConstructionError {
public:
    CertificateError(const std::string& what, Certificate cert)
        : ConstructionError(what), cert_(std::move(cert)) {}
    const Certificate& certificate() const { return cert_; }

private:
    Certificate cert_;
};

struct DescentConfig {
    int mesh_k2 = 64;     // candidate directions on a 2-sphere
    int mesh_k1 = 256;    // points on a circle
    int mesh_higher = 128;
    int sphere_level = 8;  // rule level for means over spheres of dimension >= 2
};

struct SearchConfig {
    std::vector<double> R_schedule = geometric_schedule(10.0, 1e4, 31);
    int theta_samples = 64;
    double epsilon = 0.02;
    double eta = 0.002;
    int max_candidates = 4096;
    double vol_tol = 1e-10;  // relative, for the delta root
    MeasureConfig measure;
    /// Coarser than the standalone default: every gap evaluation measures a ball.
    DescentConfig descent{16, 32, 32, 6};

    /// Throws DomainError unless 0 < epsilon < 1/(4n), 0 < eta <= epsilon and
    /// the schedules are nonempty.
    void validate(int n) const;
    static std::vector<double> geometric_schedule(double lo, double hi, int count);
};

struct GoodBall {
    double R = 0.0;
    Point theta;
    Certificate certificate;
    double slack = 0.0;
    /// true when the certificate was obtained for the radial averages.
    bool radial_average_route = false;
};

/// Far unit ball with P_{1-h}(B) >= (n - 1 + 2 eps n) |B|_{1-f}. The
/// radial-average inequality is certified first; the returned ball is the
/// first mesh direction (in mesh order) at the first qualifying radius that
/// satisfies the per-direction inequality.
GoodBall find_good_ball_below(const ScalarDensity& f, const AnisotropicDensity& h, int n,
                              const SearchConfig& cfg);

/// Far unit ball with P_{h~}(B) <= (n + eps) |B|_{h~}. Balls on which h~
/// underflows to zero carry no information and are skipped.
GoodBall find_good_ball_above(const ScalarDensity& h_dev, int n, const SearchConfig& cfg);

struct Circle {
    Point u;  // orthonormal pair spanning the circle's plane
    Point v;
    double mean_gap = 0.0;
};

/// Reduces S^{n-1} to a great circle on which the mean of `gap` stays >= 0,
/// one dimension at a time.
Circle sphere_descent(const std::function<double(const Point&)>& gap, int n,
                      const DescentConfig& cfg = {});

/// Mean of gap over the unit circle spanned by (u, v).
double circle_mean(const std::function<double(const Point&)>& gap, const Point& u, const Point& v,
                   int samples);

struct TauSample {
    double theta = 0.0;
    double delta_bar = 0.0;
};

struct ConstructionResult {
    bool success = false;
    std::string case_name;  // "below" or "above"
    std::optional<Shape> shape;
    double target_volume = 0.0;
    double achieved_volume = 0.0;
    double achieved_perimeter = 0.0;
    double mean_density = 0.0;
    /// Mean density of the construction measured with the normalized, dilated
    /// densities; equals mean_density when both limits are 1.
    double normalized_mean_density = 0.0;
    double delta_bar = 0.0;
    double R = 0.0;
    Point theta;
    double scale = 1.0;  // homothety factor (m / omega_n)^{1/n}
    Certificate certificate;
    std::vector<TauSample> tau;
    std::optional<Circle> circle;
    std::string note;
};

/// Set of f-volume m with P_h <= n omega_n^{1/n} m^{(n-1)/n}, by sweeping a good
/// ball (densities converging from below).
ConstructionResult build_small_density_set_below(const ScalarDensity& f, const AnisotropicDensity& h,
                                                 int n, double m, const SearchConfig& cfg);

/// Same target, by intersecting a good ball with a rotated copy (densities
/// converging from above with divergent tail).
ConstructionResult build_small_density_set_above(const ScalarDensity& f, const AnisotropicDensity& h,
                                                 int n, double m, const SearchConfig& cfg);

/// Volume of the unit sweep at angle delta for a density f, used by root
/// searches and their oracles.
double sweep_volume(const ScalarDensity& f, double R, const Point& theta, const Point& nu,
                    double delta, const MeasureConfig& cfg = {});
double lens_volume(const ScalarDensity& f, double R, const Point& theta, const Point& nu,
                   double delta, const MeasureConfig& cfg = {});

/// theta -> theta + delta_bar(theta) on a uniform grid of the circle through
/// e_0 and e_1 at distance R, for the sweep construction.
std::vector<TauSample> tau_map(const ScalarDensity& f, int n, double R, int samples,
                               const SearchConfig& cfg);

struct ExistenceReport {
    ConditionReport conditions;
    std::optional<ConstructionResult> construction;
    std::string overall;  // "applies", "does-not-apply" or "inconclusive"
    std::string detail;
};

ExistenceReport existence_verdict(const ScalarDensity& f, const AnisotropicDensity& h, int n,
                                  const SearchConfig& cfg, const Annulus& annulus = {});

/// Extinction time 4 n m0^{1/n} / c of m' = -(c/4) m^{(n-1)/n}.
double mass_extinction_time(double m0, double c, int n);

struct DecayTrace {
    double extinction_time = 0.0;
    long steps = 0;
};

/// RK4 integration of the saturated mass-decay equation; the step is halved
/// whenever it would carry the mass below zero.
DecayTrace integrate_mass_decay(double m0, double c, int n, double dt = 1e-3,
                                double min_step = 1e-13);

}  // namespace isolab
