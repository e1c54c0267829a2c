#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "isolab/common.hpp"

namespace isolab {

enum class CatalogId {
    constant,
    exp_approach_below,
    exp_approach_above,
    counterexample_phi,
    tabulated_radial,
    power_approach_below,
    power_approach_above,
    abs_cos_anisotropy,
    fourier_anisotropy,
    custom,
};

std::string to_string(CatalogId id);
CatalogId catalog_from_string(const std::string& name);

using RadialProfile = std::function<double(double)>;

/// Volume density f: R^n -> R^+.
///
/// `deviation` returns evaluate(x) - limit in a cancellation-free form. The
/// catalog entries provide it in closed form, which keeps deviations such as
/// 3*phi(|x|) ~ 1e-40 meaningful long after 1 + 3*phi(|x|) has rounded to 1.
struct ScalarDensity {
    std::function<double(const Point&)> evaluate;
    std::optional<double> limit_at_infinity;
    CatalogId catalog_id = CatalogId::custom;
    std::map<std::string, double> params;
    RadialProfile radial;  // set iff the density depends on |x| only
    std::function<double(const Point&)> deviation;
    RadialProfile radial_deviation;  // deviation as a function of |x|, when radial
    std::vector<double> kink_radii;

    double operator()(const Point& x) const { return evaluate(x); }
    bool is_radial() const { return static_cast<bool>(radial); }
    bool has_exact_deviation() const { return static_cast<bool>(deviation); }
    /// evaluate(x) - limit; closed form when available, else by subtraction.
    double deviation_at(const Point& x) const;
};

/// Perimeter density h: R^n x S^{n-1} -> R^+.
struct AnisotropicDensity {
    std::function<double(const Point&, const Point&)> evaluate;
    bool isotropic_hint = false;
    CatalogId catalog_id = CatalogId::custom;
    std::map<std::string, double> params;
    std::optional<double> limit_at_infinity;  // limit of h+
    std::function<double(const Point&)> exact_sup;
    std::function<double(const Point&)> sup_deviation;          // h+(x) - limit
    std::function<double(const Point&, const Point&)> deviation;  // h(x,nu) - limit
    std::optional<ScalarDensity> isotropic_base;
    RadialProfile sup_radial;            // h+ as a function of |x|, when radial
    RadialProfile sup_radial_deviation;  // h+ - limit as a function of |x|
    std::vector<double> kink_radii;

    double operator()(const Point& x, const Point& nu) const { return evaluate(x, nu); }
    double deviation_at(const Point& x, const Point& nu) const;
    /// True when h(R x, R nu) = h(x, nu) for every rotation R about the origin.
    bool is_rotation_invariant() const;
};

// Catalog ---------------------------------------------------------------

ScalarDensity constant_density(double value);
/// 1 - amplitude * exp(-rate |x|).
ScalarDensity exp_approach_below(double amplitude = 1.0, double rate = 1.0);
/// 1 + amplitude * exp(-rate |x|).
ScalarDensity exp_approach_above(double amplitude = 1.0, double rate = 1.0);
/// offset + scale * phi(|x|) with phi(t) = M exp(-M (t-1)^+).
ScalarDensity counterexample_phi(double M, double scale, double offset = 1.0);
/// 1 -/+ amplitude * max(|x|, 1)^{-power}.
ScalarDensity power_approach_below(double amplitude, double power = 1.0);
ScalarDensity power_approach_above(double amplitude, double power = 1.0);
/// Piecewise-linear radial table; constant extrapolation beyond the last
/// radius, reported once through `warn` when it first happens.
ScalarDensity tabulated_radial(std::vector<std::pair<double, double>> rows,
                               std::function<void(const std::string&)> warn = {});
ScalarDensity tabulated_radial_from_csv(const std::string& path,
                                        std::function<void(const std::string&)> warn = {});
ScalarDensity custom_density(std::function<double(const Point&)> evaluate,
                             std::optional<double> limit = std::nullopt);

/// h(x, nu) = g(x).
AnisotropicDensity isotropic(const ScalarDensity& g);
/// h(x, nu) = a(x) + b(x) |<nu, axis>| with |axis| = 1.
AnisotropicDensity abs_cos_anisotropy(const ScalarDensity& a, const ScalarDensity& b,
                                      const Point& axis);
/// Planar anisotropy h(x, nu) = g(x) (1 + sum_k c_k cos(k psi) + s_k sin(k psi)),
/// psi the polar angle of nu. No closed-form sup.
AnisotropicDensity fourier_anisotropy(const ScalarDensity& g, std::vector<double> cos_terms,
                                      std::vector<double> sin_terms);

/// Divides f by its limit a and h by the limit b of h+. Both limits must be
/// declared.
std::pair<ScalarDensity, AnisotropicDensity> normalize(const ScalarDensity& f,
                                                       const AnisotropicDensity& h);

// Operations ------------------------------------------------------------

struct DirectionMeshConfig {
    int directions_2d = 720;
    int directions_3d = 4096;
    /// Local refinement around the best mesh direction (golden section in
    /// 2D, shrinking pattern search otherwise).
    bool refine = true;
};

/// h+(x) = sup over nu of h(x, nu).
double sup_over_directions(const AnisotropicDensity& h, const Point& x,
                           const DirectionMeshConfig& cfg = {});

/// Quasi-uniform direction mesh used for sup scans and angular sampling.
std::vector<Point> direction_mesh(int n, int count);

/// h+ as a scalar density.
ScalarDensity sup_density(const AnisotropicDensity& h, const DirectionMeshConfig& cfg = {});

/// (f~, h~) = (|f - 1|, |h+ - 1|). Requires limits equal to 1.
std::pair<ScalarDensity, ScalarDensity> deviation_fields(const ScalarDensity& f,
                                                         const AnisotropicDensity& h,
                                                         const DirectionMeshConfig& cfg = {});

struct RadialAverageConfig {
    int initial_nodes = 64;
    int max_doublings = 5;
    double rel_tol = 1e-12;
};

/// t -> mean of g over the sphere of radius |t|. Radial input is returned
/// unchanged.
ScalarDensity radial_average(const ScalarDensity& g, int n,
                             const RadialAverageConfig& cfg = {});

/// Probing region standing in for "far from the origin".
struct Annulus {
    double inner_radius = 10.0;
    double outer_radius = 100.0;
    int radial_samples = 32;
    int angular_samples = 64;

    void validate() const;
    /// Geometric radius schedule from inner to outer radius.
    std::vector<double> radii() const;
};

enum class ConvergenceClass { from_below, from_above, exact, mixed, not_converging };
std::string to_string(ConvergenceClass c);

struct ConvergenceResult {
    ConvergenceClass cls = ConvergenceClass::not_converging;
    double limit = 1.0;
    double max_excess = 0.0;    // max of g - limit over samples
    double max_deficit = 0.0;   // max of limit - g over samples
    double inner_envelope = 0.0;
    double outer_envelope = 0.0;
};

/// Classifies how g approaches its limit on the annulus. `exact` is the
/// degenerate case g == limit on every sample, which belongs to both
/// one-sided classes.
ConvergenceResult classify_convergence(const ScalarDensity& g, int n, const Annulus& annulus,
                                       double tol = 1e-12);

inline bool converges_from_below(ConvergenceClass c) {
    return c == ConvergenceClass::from_below || c == ConvergenceClass::exact;
}
inline bool converges_from_above(ConvergenceClass c) {
    return c == ConvergenceClass::from_above || c == ConvergenceClass::exact;
}

struct RatioResult {
    /// inf { C : f~ <= C h~ } on the samples, i.e. the largest ratio f~/h~.
    double below_constant = 0.0;
    /// sup { C : f~ >= C h~ } on the samples, i.e. the smallest ratio f~/h~.
    double above_constant = 0.0;
    double threshold = 0.0;  // n / (n - 1)
    int informative_samples = 0;
    bool below_holds() const { return below_constant < threshold; }
    bool above_holds() const { return above_constant > threshold; }
};

/// Sampled ratio constants of f~ and h~ over the annulus. Points where both
/// fields are negligible carry no information about C and are skipped: the
/// floor is 1e-14 for deviations formed by subtraction and the smallest
/// normal double for closed-form deviations.
RatioResult ratio_condition(const ScalarDensity& f_dev, const ScalarDensity& h_dev,
                            const Annulus& annulus, int n);

enum class Confidence { high, low };
std::string to_string(Confidence c);

struct TailConfig {
    double outer_factor = 1e4;  // fit on [R, outer_factor * R]
    int samples = 48;
    double eps_fit = 0.05;
    double growth_multiple = 3.0;
    double residual_limit = 0.25;
};

struct TailVerdict {
    bool divergent = false;
    Confidence confidence = Confidence::high;
    double fitted_exponent = 0.0;  // g ~ t^{fitted_exponent}
    double fit_residual = 0.0;
    double partial_ratio = 0.0;    // total block mass / first block mass
};

/// Heuristic verdict on whether the integral of g_r over [R, inf) diverges.
TailVerdict tail_integral_diverges(const RadialProfile& g_r, double R,
                                   const TailConfig& cfg = {});

enum class HypothesisVerdict {
    below_case_holds,
    above_case_holds,
    trivially_exists,
    inconclusive,
    fails,
};
std::string to_string(HypothesisVerdict v);

struct ConditionReport {
    int dimension = 2;
    Annulus annulus;
    ConvergenceClass convergence_class_f = ConvergenceClass::not_converging;
    ConvergenceClass convergence_class_hplus = ConvergenceClass::not_converging;
    double ratio_min = 0.0;  // sup { C : f~ >= C h~ }
    double ratio_max = 0.0;  // inf { C : f~ <= C h~ }
    double threshold = 0.0;
    std::optional<bool> tail_divergent;
    std::optional<Confidence> tail_confidence;
    double tail_exponent = 0.0;
    double boundedness_ratio = 0.0;  // smallest sampled lambda with h+ <= lambda f
    HypothesisVerdict verdict = HypothesisVerdict::inconclusive;
    std::string reason;
};

struct ConditionConfig {
    double convergence_tol = 1e-12;
    TailConfig tail;
    DirectionMeshConfig mesh;
};

/// Evaluates every hypothesis of the existence theorem on the annulus.
ConditionReport condition_report(const ScalarDensity& f, const AnisotropicDensity& h, int n,
                                 const Annulus& annulus, const ConditionConfig& cfg = {});

}  // namespace isolab
