#pragma once

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isolab/common.hpp"
#include "isolab/densities.hpp"

namespace isolab {

enum class ShapeKind { ball, rotation_sweep, lens, polar2d, union_list, truncated };
std::string to_string(ShapeKind k);

struct BoundarySample {
    Point point;
    Point normal;  // outward, unit
    int piece = 0;  // index into the owning region's piece_names()
};

/// A bounded region star-shaped with respect to star_centre(): every ray
/// from the centre leaves the region exactly once, at exit_distance(omega).
/// All shape kinds are assembled from such regions, which lets one polar
/// quadrature serve every kind.
class StarRegion {
public:
    virtual ~StarRegion() = default;

    virtual int dimension() const = 0;
    virtual const Point& star_centre() const = 0;
    virtual double exit_distance(const Point& omega) const = 0;
    virtual BoundarySample boundary(const Point& omega) const = 0;
    virtual bool contains(const Point& x) const = 0;
    /// Upper bound on exit_distance over all directions.
    virtual double bounding_radius() const = 0;
    virtual std::vector<std::string> piece_names() const = 0;
    /// Planar regions: polar angles (about the star centre) where two
    /// boundary pieces meet or the boundary has a corner.
    virtual std::vector<double> seam_angles() const { return {}; }
};

using RegionPtr = std::shared_ptr<const StarRegion>;

/// Immutable region of R^n made of one or more star regions at positive
/// distance from each other.
class Shape {
public:
    Shape(ShapeKind kind, int n, nlohmann::json params, std::vector<RegionPtr> parts);

    ShapeKind kind() const { return kind_; }
    int dimension() const { return n_; }
    const nlohmann::json& params() const { return params_; }
    const std::vector<RegionPtr>& parts() const { return parts_; }
    bool empty() const { return parts_.empty(); }

    bool contains(const Point& x) const;
    /// Piece names across all parts, prefixed with the part index when the
    /// shape has more than one part.
    std::vector<std::string> piece_names() const;
    /// Smallest ball (about the first star centre) known to contain the shape.
    double bounding_radius_about(const Point& p) const;

    nlohmann::json to_json() const;

private:
    ShapeKind kind_;
    int n_;
    nlohmann::json params_;
    std::vector<RegionPtr> parts_;
};

struct HyperplaneSplit {
    Shape ball;
    Point centre;
    double radius = 1.0;
    Point plane_normal;  // H+ = { <x, plane_normal> > 0 }
};

/// Plane through the origin spanned by two orthonormal vectors.
struct SweepPlane {
    Point u;
    Point v;
};

/// The plane spanned by e_i and e_j.
SweepPlane coordinate_plane(int n, int i = 0, int j = 1);

Shape make_ball(const Point& centre, double radius);

/// Splits a ball by the hyperplane through the origin with the given normal.
/// The plane has to contain the direction of the centre.
HyperplaneSplit split_by_hyperplane(const Shape& ball, const Point& plane_normal);

/// Union of the rotated copies rho_s(B), 0 <= s <= delta, where rho_s turns
/// the sweep plane by s. Pieces: lower_cap (part of the original sphere),
/// upper_cap (part of the rotated sphere) and lateral (the swept seam).
Shape rotation_sweep(const Shape& ball, double delta, const SweepPlane& plane);

/// B intersected with rho_delta(B). Pieces: ball_arc (on the sphere of B)
/// and rotated_arc (on the sphere of rho_delta(B)).
Shape lens(const Shape& ball, double delta, const SweepPlane& plane);

/// Largest sweep angle for which the swept region stays star-shaped about
/// the midpoint of the sweep arc.
double max_sweep_angle(double centre_distance, double radius);

/// Planar star region r(theta) = r0 + sum a_k cos(k theta) + b_k sin(k theta)
/// about `centre`; coefficients laid out as [r0, a1, b1, a2, b2, ...].
Shape polar_shape(const Point& centre, const std::vector<double>& coeffs, double r_min = 1e-6);

/// Disjoint union. Members must stay at least gap_min apart.
Shape union_of(const std::vector<Shape>& members, double gap_min = 1e-6);

struct CompensationConfig {
    double vol_tol = 1e-10;  // relative
    int max_iter = 200;
    double gap_min = 1e-6;
};

/// (E ∩ B_R) ∪ B(p, r*) where the far ball B(p, r*) sits on the ray
/// far_direction with its nearest point at distance far_distance from the
/// origin, and r* makes the total f-volume equal to V. R = infinity keeps E
/// whole.
Shape truncate_and_compensate(const Shape& E, double R, const ScalarDensity& f, double V,
                              const Point& far_direction, double far_distance,
                              const CompensationConfig& cfg = {});

/// Radius of the compensating far ball in a truncated shape (0 if none).
double compensation_radius(const Shape& truncated);

/// Signed distance between two parts estimated from boundary samples; negative
/// when they overlap.
double part_gap(const StarRegion& a, const StarRegion& b);

/// Closed 2D boundary polylines, one per part, with `segments` segments each.
std::vector<std::vector<Point>> boundary_polylines(const Shape& shape, int segments = 256);
std::string to_svg(const Shape& shape, int segments = 256);

}  // namespace isolab
