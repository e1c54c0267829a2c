#include "regions.hpp"

#include <algorithm>

#include "isolab/quadrature.hpp"

namespace isolab::detail {

namespace {

double angle_of(const Point& p) { return std::atan2(p(1), p(0)); }

// Distance from `from` along unit omega to the sphere |x - c| = r, for
// `from` inside the sphere.
double exit_from_inside(const Point& from, const Point& c, double r, const Point& omega) {
    const Point d = from - c;
    const double b = omega.dot(d);
    const double disc = b * b - (d.squaredNorm() - r * r);
    return -b + std::sqrt(std::max(disc, 0.0));
}

}  // namespace

// Ball ------------------------------------------------------------------

BallRegion::BallRegion(Point centre, double radius) : centre_(std::move(centre)), radius_(radius) {}

BoundarySample BallRegion::boundary(const Point& omega) const {
    return {centre_ + radius_ * omega, omega, 0};
}

bool BallRegion::contains(const Point& x) const { return (x - centre_).norm() <= radius_; }

// Sweep -----------------------------------------------------------------

SweepRegion::SweepRegion(double R, double r, Point theta, Point nu, double delta)
    : R_(R), r_(r), theta_(std::move(theta)), nu_(std::move(nu)), delta_(delta) {
    mid_ = arc(0.5 * delta_);
}

Point SweepRegion::arc(double s) const { return R_ * (std::cos(s) * theta_ + std::sin(s) * nu_); }

SweepRegion::Nearest SweepRegion::nearest(const Point& x) const {
    const Point a0 = arc(0.0);
    const Point a1 = arc(delta_);
    Nearest best{a0, (x - a0).norm(), 0};
    const double d1 = (x - a1).norm();
    if (d1 < best.dist) best = {a1, d1, 1};

    const double X = x.dot(theta_);
    const double Y = x.dot(nu_);
    const double planar = std::hypot(X, Y);
    if (planar > 0) {
        const double phi = std::atan2(Y, X);
        if (phi >= 0.0 && phi <= delta_) {
            const double perp2 = std::max(x.squaredNorm() - planar * planar, 0.0);
            const double d = std::sqrt((planar - R_) * (planar - R_) + perp2);
            if (d < best.dist) best = {arc(phi), d, 2};
        }
    }
    return best;
}

bool SweepRegion::contains(const Point& x) const { return nearest(x).dist <= r_; }

double SweepRegion::bounding_radius() const { return 2.0 * R_ * std::sin(0.25 * delta_) + r_; }

double SweepRegion::exit_distance(const Point& omega) const {
    const double hi = bounding_radius() * (1.0 + 1e-12);
    auto g = [&](double s) { return nearest(mid_ + s * omega).dist - r_; };
    return bracketed_root(g, 0.0, hi, 0.0, 1e-15 * hi, 400).root;
}

BoundarySample SweepRegion::boundary(const Point& omega) const {
    const Point y = mid_ + exit_distance(omega) * omega;
    const Nearest q = nearest(y);
    Point normal = y - q.q;
    const double len = normal.norm();
    if (!(len > 0)) throw GeometryError("sweep boundary: degenerate normal");
    return {y, normal / len, q.piece};
}

std::vector<double> SweepRegion::seam_angles() const {
    if (dimension() != 2) return {};
    std::vector<double> out;
    for (double s : {0.0, delta_}) {
        const Point a = arc(s);
        const Point radial = a / R_;
        for (double sgn : {1.0, -1.0}) out.push_back(angle_of(a + sgn * r_ * radial - mid_));
    }
    return out;
}

// Lens ------------------------------------------------------------------

LensRegion::LensRegion(Point c0, Point c1, double r)
    : c0_(std::move(c0)), c1_(std::move(c1)), r_(r) {
    mid_ = 0.5 * (c0_ + c1_);
}

double LensRegion::ray_exit(const Point& c, const Point& omega) const {
    return exit_from_inside(mid_, c, r_, omega);
}

double LensRegion::exit_distance(const Point& omega) const {
    return std::min(ray_exit(c0_, omega), ray_exit(c1_, omega));
}

BoundarySample LensRegion::boundary(const Point& omega) const {
    const double s0 = ray_exit(c0_, omega);
    const double s1 = ray_exit(c1_, omega);
    const bool first = s0 <= s1;
    const Point y = mid_ + (first ? s0 : s1) * omega;
    const Point& c = first ? c0_ : c1_;
    return {y, (y - c) / r_, first ? 0 : 1};
}

bool LensRegion::contains(const Point& x) const {
    return (x - c0_).norm() <= r_ && (x - c1_).norm() <= r_;
}

std::vector<double> LensRegion::seam_angles() const {
    if (dimension() != 2) return {};
    const Point d = c1_ - c0_;
    const double a = angle_of(d);
    return {a + 0.5 * kPi, a - 0.5 * kPi};
}

// Polar -----------------------------------------------------------------

PolarRegion::PolarRegion(Point centre, std::vector<double> coeffs)
    : centre_(std::move(centre)), coeffs_(std::move(coeffs)) {}

double PolarRegion::radius_at(double angle) const {
    double r = coeffs_[0];
    for (std::size_t i = 1; i < coeffs_.size(); i += 2) {
        const double k = static_cast<double>((i + 1) / 2);
        r += coeffs_[i] * std::cos(k * angle);
        if (i + 1 < coeffs_.size()) r += coeffs_[i + 1] * std::sin(k * angle);
    }
    return r;
}

double PolarRegion::radius_derivative_at(double angle) const {
    double dr = 0.0;
    for (std::size_t i = 1; i < coeffs_.size(); i += 2) {
        const double k = static_cast<double>((i + 1) / 2);
        dr -= k * coeffs_[i] * std::sin(k * angle);
        if (i + 1 < coeffs_.size()) dr += k * coeffs_[i + 1] * std::cos(k * angle);
    }
    return dr;
}

double PolarRegion::exit_distance(const Point& omega) const {
    return radius_at(angle_of(omega));
}

BoundarySample PolarRegion::boundary(const Point& omega) const {
    const double t = angle_of(omega);
    const double r = radius_at(t);
    const double dr = radius_derivative_at(t);
    const Point tangent_dir = polar_direction(t + 0.5 * kPi);
    Point normal = r * omega - dr * tangent_dir;
    const double len = normal.norm();
    if (!(len > 0)) {
        throw GeometryError("polar boundary: zero-length tangent at angle " + std::to_string(t));
    }
    return {centre_ + r * omega, normal / len, 0};
}

bool PolarRegion::contains(const Point& x) const {
    const Point d = x - centre_;
    const double dist = d.norm();
    if (dist == 0.0) return true;
    return dist <= radius_at(angle_of(d));
}

double PolarRegion::bounding_radius() const {
    double b = coeffs_[0];
    for (std::size_t i = 1; i < coeffs_.size(); ++i) b += std::abs(coeffs_[i]);
    return b;
}

// Clipped ---------------------------------------------------------------

ClippedRegion::ClippedRegion(RegionPtr base, double R) : base_(std::move(base)), R_(R) {
    if (!(base_->star_centre().norm() < R_)) {
        throw GeometryError("truncation: part centre lies outside the truncation ball");
    }
}

double ClippedRegion::sphere_exit(const Point& omega) const {
    return exit_from_inside(base_->star_centre(), Point::Zero(dimension()), R_, omega);
}

double ClippedRegion::exit_distance(const Point& omega) const {
    return std::min(base_->exit_distance(omega), sphere_exit(omega));
}

BoundarySample ClippedRegion::boundary(const Point& omega) const {
    const double sb = base_->exit_distance(omega);
    const double ss = sphere_exit(omega);
    if (sb <= ss) return base_->boundary(omega);
    const Point y = base_->star_centre() + ss * omega;
    return {y, y / R_, static_cast<int>(base_->piece_names().size())};
}

bool ClippedRegion::contains(const Point& x) const {
    return x.norm() <= R_ && base_->contains(x);
}

std::vector<std::string> ClippedRegion::piece_names() const {
    auto names = base_->piece_names();
    names.push_back("truncation_sphere");
    return names;
}

std::vector<double> ClippedRegion::seam_angles() const {
    if (dimension() != 2) return {};
    std::vector<double> out = base_->seam_angles();
    auto gap = [this](double t) {
        const Point w = polar_direction(t);
        return base_->exit_distance(w) - sphere_exit(w);
    };
    constexpr int kScan = 4096;
    double prev = gap(-kPi);
    for (int i = 1; i <= kScan; ++i) {
        const double t0 = -kPi + 2.0 * kPi * (i - 1) / kScan;
        const double t1 = -kPi + 2.0 * kPi * i / kScan;
        const double cur = gap(t1);
        if ((prev > 0) != (cur > 0)) {
            out.push_back(bracketed_root(gap, t0, t1, 0.0, 1e-15).root);
        }
        prev = cur;
    }
    return out;
}

}  // namespace isolab::detail
