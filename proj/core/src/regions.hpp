#pragma once

#include "isolab/shapes.hpp"

namespace isolab::detail {

class BallRegion final : public StarRegion {
public:
    BallRegion(Point centre, double radius);
    int dimension() const override { return static_cast<int>(centre_.size()); }
    const Point& star_centre() const override { return centre_; }
    double exit_distance(const Point&) const override { return radius_; }
    BoundarySample boundary(const Point& omega) const override;
    bool contains(const Point& x) const override;
    double bounding_radius() const override { return radius_; }
    std::vector<std::string> piece_names() const override { return {"sphere"}; }

    double radius() const { return radius_; }

private:
    Point centre_;
    double radius_;
};

/// Tube of radius r around the arc s -> R (theta cos s + nu sin s), s in
/// [0, delta], star-shaped about the arc midpoint.
class SweepRegion final : public StarRegion {
public:
    SweepRegion(double R, double r, Point theta, Point nu, double delta);
    int dimension() const override { return static_cast<int>(theta_.size()); }
    const Point& star_centre() const override { return mid_; }
    double exit_distance(const Point& omega) const override;
    BoundarySample boundary(const Point& omega) const override;
    bool contains(const Point& x) const override;
    double bounding_radius() const override;
    std::vector<std::string> piece_names() const override {
        return {"lower_cap", "upper_cap", "lateral"};
    }
    std::vector<double> seam_angles() const override;

    Point arc(double s) const;

private:
    struct Nearest {
        Point q;
        double dist;
        int piece;
    };
    Nearest nearest(const Point& x) const;

    double R_;
    double r_;
    Point theta_;
    Point nu_;
    double delta_;
    Point mid_;
};

/// B(c0, r) ∩ B(c1, r), star-shaped about the midpoint of the centres.
class LensRegion final : public StarRegion {
public:
    LensRegion(Point c0, Point c1, double r);
    int dimension() const override { return static_cast<int>(c0_.size()); }
    const Point& star_centre() const override { return mid_; }
    double exit_distance(const Point& omega) const override;
    BoundarySample boundary(const Point& omega) const override;
    bool contains(const Point& x) const override;
    double bounding_radius() const override { return r_; }
    std::vector<std::string> piece_names() const override { return {"ball_arc", "rotated_arc"}; }
    std::vector<double> seam_angles() const override;

private:
    double ray_exit(const Point& c, const Point& omega) const;

    Point c0_;
    Point c1_;
    double r_;
    Point mid_;
};

class PolarRegion final : public StarRegion {
public:
    PolarRegion(Point centre, std::vector<double> coeffs);
    int dimension() const override { return 2; }
    const Point& star_centre() const override { return centre_; }
    double exit_distance(const Point& omega) const override;
    BoundarySample boundary(const Point& omega) const override;
    bool contains(const Point& x) const override;
    double bounding_radius() const override;
    std::vector<std::string> piece_names() const override { return {"curve"}; }

    double radius_at(double angle) const;
    double radius_derivative_at(double angle) const;
    const std::vector<double>& coeffs() const { return coeffs_; }

private:
    Point centre_;
    std::vector<double> coeffs_;
};

/// base ∩ B(0, R). The star centre of base must lie inside B(0, R).
class ClippedRegion final : public StarRegion {
public:
    ClippedRegion(RegionPtr base, double R);
    int dimension() const override { return base_->dimension(); }
    const Point& star_centre() const override { return base_->star_centre(); }
    double exit_distance(const Point& omega) const override;
    BoundarySample boundary(const Point& omega) const override;
    bool contains(const Point& x) const override;
    double bounding_radius() const override { return base_->bounding_radius(); }
    std::vector<std::string> piece_names() const override;
    std::vector<double> seam_angles() const override;

private:
    double sphere_exit(const Point& omega) const;

    RegionPtr base_;
    double R_;
};

}  // namespace isolab::detail
