#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "isolab/densities.hpp"
#include "isolab/quadrature.hpp"
#include "isolab/shapes.hpp"

namespace isolab {

enum class MeasureMethod { product_quadrature, slicing_1d, monte_carlo };
std::string to_string(MeasureMethod m);

struct MeasureResult {
    double value = 0.0;
    double error = 0.0;
    MeasureMethod method = MeasureMethod::product_quadrature;
    long nodes = 0;
    std::optional<std::uint64_t> seed;
};

struct MeasureConfig {
    /// Outer angular integral for planar shapes.
    QuadConfig angular{64, 1e-9, 0.0, 20};
    /// Inner radial integral along each ray.
    QuadConfig radial{32, 1e-13, 0.0, 12};
    /// Sphere rule level for n >= 3; 0 picks 16 for n = 3 and 6 above.
    int sphere_level = 0;
    int sphere_doublings = 3;
    double sphere_rel_tol = 1e-9;
    /// When false, unmet tolerances are reported through the error
    /// estimate instead of a ToleranceError.
    bool strict = true;
};

/// |E|_f, the integral of f over E.
MeasureResult weighted_volume(const Shape& shape, const ScalarDensity& f, const MeasureConfig& cfg = {});

/// P_h(E), the integral of h(x, nu(x)) over the boundary of E.
MeasureResult weighted_perimeter(const Shape& shape, const AnisotropicDensity& h,
                                 const MeasureConfig& cfg = {});

/// Integral of g(x, nu) over the boundary, optionally restricted to one named
/// piece. `kinks` are radii |x| where g is not smooth.
MeasureResult boundary_integral(const Shape& shape,
                                const std::function<double(const Point&, const Point&)>& g,
                                const std::vector<double>& kinks, const std::string& piece = "",
                                const MeasureConfig& cfg = {});

/// Weighted boundary measure of every named piece.
std::map<std::string, MeasureResult> boundary_piece_measures(const Shape& shape,
                                                             const AnisotropicDensity& h,
                                                             const MeasureConfig& cfg = {});

/// Weighted measure of the half boundary on side +1 or -1 of the splitting
/// hyperplane, and the f-volume of the corresponding half ball.
MeasureResult half_boundary_measure(const HyperplaneSplit& split, int side,
                                    const AnisotropicDensity& h, const MeasureConfig& cfg = {});
MeasureResult half_volume(const HyperplaneSplit& split, int side, const ScalarDensity& f,
                          const MeasureConfig& cfg = {});

/// Rejection sampling in the bounding box of the shape.
MeasureResult monte_carlo_volume(const Shape& shape, const ScalarDensity& f, long samples,
                                 std::uint64_t seed);

/// rho with P = n (omega_n rho)^{1/n} V^{(n-1)/n}.
double mean_density_from(double perimeter, double volume, int n);
double mean_density(const Shape& shape, const ScalarDensity& f, const AnisotropicDensity& h, int n,
                    const MeasureConfig& cfg = {});

/// Flat-layer profiles of the unit ball whose centre sits at distance R from
/// the origin: alpha_R(t) dt is the surface measure of the ball's sphere between
/// the spheres |x| = R + t and R + t + dt, beta_R(t) dt the volume.
struct LayerProfiles {
    int n = 2;
    double R = 0.0;  // infinity for the flat limit
    std::function<double(double)> alpha_R;
    std::function<double(double)> beta_R;
    std::function<double(double)> alpha;
    std::function<double(double)> beta;
};

LayerProfiles layer_profiles(int n, double R);

struct SlicingResult {
    MeasureResult perimeter;
    MeasureResult volume;
};

/// Perimeter and volume of the unit ball at distance R weighted by the radial
/// profile g_r, as one-dimensional integrals against alpha_R and beta_R.
SlicingResult offcenter_ball_slicing(int n, double R, const RadialProfile& g_r,
                                     const std::vector<double>& kinks = {},
                                     const QuadConfig& cfg = {});

}  // namespace isolab
