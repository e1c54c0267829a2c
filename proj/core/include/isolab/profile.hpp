#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isolab/densities.hpp"
#include "isolab/measures.hpp"
#include "isolab/shapes.hpp"

namespace isolab {

enum class ProfileMethod { polar_descent, far_ball_scan, combined };
std::string to_string(ProfileMethod m);

struct OptimizerConfig {
    int modes = 4;  // Fourier modes per shape, at most 16
    int max_iterations = 200;
    double initial_step = 0.05;
    double min_step = 1e-4;
    /// One start per distance, centred on the positive first axis.
    std::vector<double> centre_distances{0.0, 1.5, 3.0, 6.0, 12.0};
    double volume_rel_tol = 1e-10;
    double r_min = 1e-3;
    MeasureConfig measure;

    void validate() const;
};

struct TraceRow {
    int iteration = 0;
    double perimeter = 0.0;
    double volume_violation = 0.0;  // relative
    double centre_distance = 0.0;
};

struct ProfilePoint {
    double V = 0.0;
    /// P_h of the best shape found: an upper bound for the profile at V.
    double J_estimate = 0.0;
    std::optional<Shape> best_shape;
    std::vector<TraceRow> optimizer_trace;
    ProfileMethod method = ProfileMethod::polar_descent;
    double best_centre_distance = 0.0;
    /// Best perimeter reached from each start, in start order.
    std::vector<std::pair<double, double>> start_results;
    double sanity_floor = 0.0;
    std::vector<std::string> warnings;
};

/// Polar Fourier shape with the given centre and coefficients, rescaled about
/// its centre so that its f-volume is V.
Shape project_to_volume(const Point& centre, std::vector<double> coeffs, const ScalarDensity& f,
                        double V, const OptimizerConfig& cfg);

/// Pattern search for the planar profile J(V) = inf { P_h(E) : |E|_f = V }
/// over polar shapes (centre and Fourier coefficients).
ProfilePoint estimate_profile(const ScalarDensity& f, const AnisotropicDensity& h, double V,
                              const OptimizerConfig& cfg = {});

/// P_h(E) + n (a omega_n)^{1/n} (V - |E|_f)^{(n-1)/n}; an absent E is empty.
double scarto_rhs(const std::optional<Shape>& E, double V, double a, int n, const ScalarDensity& f,
                  const AnisotropicDensity& h, const MeasureConfig& cfg = {});

struct FarBallPoint {
    double R = 0.0;
    double perimeter = 0.0;
    double radius = 0.0;
    bool ok = true;
    std::string error;
};

/// For each centre distance R, the ball on the first axis with f-volume V and
/// its weighted perimeter.
std::vector<FarBallPoint> far_ball_scan(const ScalarDensity& f, const AnisotropicDensity& h,
                                        double V, const std::vector<double>& R_schedule,
                                        int n = 2, const MeasureConfig& cfg = {});

enum class Evidence { consistent_with_nonexistence, violation_found };
std::string to_string(Evidence e);

struct InequalityCheck {
    int shape_id = 0;
    double lhs = 0.0;  // P_phi(E)
    double rhs = 0.0;  // constant times |E|_phi
    double slack = 0.0;
    bool holds() const { return slack >= 0; }
};

struct SampleRecord {
    int id = 0;
    double centre_distance = 0.0;
    double perimeter = 0.0;  // P_h
    double phi_perimeter = 0.0;
    double phi_volume = 0.0;
    bool disjoint_from_unit_ball = false;
    bool inside_unit_ball = false;
    std::vector<double> coeffs;
    Point centre;
};

struct CounterexampleConfig {
    int modes = 6;
    double max_centre_distance = 6.0;
    std::vector<double> far_ball_schedule = {1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 7.0, 10.0, 20.0, 50.0};
    OptimizerConfig optimizer = [] {
        OptimizerConfig o;
        o.modes = 2;
        o.max_iterations = 60;
        o.centre_distances = {0.0, 2.0, 4.0, 8.0};
        return o;
    }();
    bool run_optimizer = true;
    MeasureConfig measure;
};

struct CounterexampleReport {
    double M = 0.0;
    std::uint64_t seed = 0;
    int samples_tested = 0;
    double min_perimeter_seen = 0.0;
    std::vector<FarBallPoint> far_ball_curve;
    std::vector<InequalityCheck> phi_bound_checks;   // P_phi >= 6 |E|_phi, every sample
    std::vector<InequalityCheck> phi_far_bound_checks;  // P_phi >= 12 |E|_phi, samples outside B
    std::vector<SampleRecord> samples;
    std::optional<ProfilePoint> profile;
    Evidence verdict_evidence = Evidence::consistent_with_nonexistence;
    std::optional<SampleRecord> witness;
    int perimeter_failures = 0;
    int phi_bound_failures = 0;
    int phi_far_bound_failures = 0;
};

/// The densities of the non-existence example: f = 1 + 3 phi, h = 1 + phi.
std::pair<ScalarDensity, AnisotropicDensity> counterexample_densities(double M);

/// Random star-shaped samples of f-volume pi tested against 2 pi and the
/// phi-perimeter inequalities, plus the far-ball curve and an optimizer run.
CounterexampleReport counterexample_suite(double M, int sample_budget, std::uint64_t seed,
                                          const CounterexampleConfig& cfg = {});

/// Max over boundary samples of | |x - centre| - radius |, for star shapes
/// about the same centre.
double hausdorff_to_disk(const Shape& shape, const Point& centre, double radius, int samples = 1024);

}  // namespace isolab
