#include "isolab/shapes.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

#include "regions.hpp"

namespace isolab {

namespace {

nlohmann::json point_json(const Point& p) {
    return std::vector<double>(p.data(), p.data() + p.size());
}

Point json_point(const nlohmann::json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

struct BallGeometry {
    Point centre;
    double radius;
};

BallGeometry ball_geometry(const Shape& ball) {
    if (ball.kind() != ShapeKind::ball) throw GeometryError("expected a ball shape");
    return {json_point(ball.params().at("centre")), ball.params().at("radius").get<double>()};
}

// theta = direction of the centre, nu = theta turned by +pi/2 in the plane.
struct PlaneFrame {
    double R;
    Point theta;
    Point nu;
};

PlaneFrame frame_in_plane(const Point& c, const SweepPlane& plane) {
    const int n = static_cast<int>(c.size());
    if (plane.u.size() != n || plane.v.size() != n) {
        throw GeometryError("sweep plane dimension does not match the ball");
    }
    if (std::abs(plane.u.norm() - 1.0) > 1e-9 || std::abs(plane.v.norm() - 1.0) > 1e-9 ||
        std::abs(plane.u.dot(plane.v)) > 1e-9) {
        throw GeometryError("sweep plane must be given by two orthonormal vectors");
    }
    const double X = c.dot(plane.u);
    const double Y = c.dot(plane.v);
    const double off = (c - X * plane.u - Y * plane.v).norm();
    if (off > 1e-9 * std::max(1.0, c.norm())) {
        throw GeometryError("ball centre is off the sweep plane (distance " + std::to_string(off) +
                            ")");
    }
    const double R = std::hypot(X, Y);
    if (!(R > 0)) throw GeometryError("ball centre at the origin has no sweep direction");
    return {R, (X * plane.u + Y * plane.v) / R, (-Y * plane.u + X * plane.v) / R};
}

nlohmann::json rotated_params(const Shape& ball, double delta, const SweepPlane& plane,
                              double R) {
    return {{"ball", ball.params()},
            {"delta", delta},
            {"plane_u", point_json(plane.u)},
            {"plane_v", point_json(plane.v)},
            {"centre_distance", R}};
}

void check_delta(double delta) {
    if (!(delta >= 0.0) || !(delta < 0.25 * kPi)) {
        throw GeometryError("rotation angle must lie in [0, pi/4)");
    }
}

}  // namespace

std::string to_string(ShapeKind k) {
    switch (k) {
        case ShapeKind::ball: return "ball";
        case ShapeKind::rotation_sweep: return "rotation_sweep";
        case ShapeKind::lens: return "lens";
        case ShapeKind::polar2d: return "polar2d";
        case ShapeKind::union_list: return "union_list";
        case ShapeKind::truncated: return "truncated";
    }
    return "?";
}

Shape::Shape(ShapeKind kind, int n, nlohmann::json params, std::vector<RegionPtr> parts)
    : kind_(kind), n_(n), params_(std::move(params)), parts_(std::move(parts)) {}

bool Shape::contains(const Point& x) const {
    return std::any_of(parts_.begin(), parts_.end(), [&](const RegionPtr& p) { return p->contains(x); });
}

std::vector<std::string> Shape::piece_names() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        for (const auto& name : parts_[i]->piece_names()) {
            out.push_back(parts_.size() > 1 ? "part" + std::to_string(i) + "." + name : name);
        }
    }
    return out;
}

double Shape::bounding_radius_about(const Point& p) const {
    double b = 0.0;
    for (const auto& part : parts_) {
        b = std::max(b, (part->star_centre() - p).norm() + part->bounding_radius());
    }
    return b;
}

nlohmann::json Shape::to_json() const {
    return {{"kind", to_string(kind_)}, {"dimension", n_}, {"params", params_}};
}

SweepPlane coordinate_plane(int n, int i, int j) {
    if (i == j || i < 0 || j < 0 || i >= n || j >= n) throw DomainError("invalid coordinate plane");
    return {unit_vector(n, i), unit_vector(n, j)};
}

Shape make_ball(const Point& centre, double radius) {
    if (!(radius > 0)) throw DomainError("ball radius must be positive");
    if (centre.size() < 2) throw DomainError("ball dimension must be at least 2");
    if (!centre.allFinite()) throw DomainError("ball centre must be finite");
    return Shape(ShapeKind::ball, static_cast<int>(centre.size()),
                 {{"centre", point_json(centre)}, {"radius", radius}},
                 {std::make_shared<detail::BallRegion>(centre, radius)});
}

HyperplaneSplit split_by_hyperplane(const Shape& ball, const Point& plane_normal) {
    const auto [c, r] = ball_geometry(ball);
    if (plane_normal.size() != c.size()) throw GeometryError("plane normal has wrong dimension");
    const double len = plane_normal.norm();
    if (!(len > 0)) throw GeometryError("plane normal must be nonzero");
    const Point e = plane_normal / len;
    const double cn = c.norm();
    if (cn > 0 && std::abs(e.dot(c / cn)) > 1e-9) {
        throw GeometryError("splitting plane does not contain the ball centre direction");
    }
    return {ball, c, r, e};
}

double max_sweep_angle(double centre_distance, double radius) {
    return 2.0 * std::acos(std::clamp((centre_distance - radius) / centre_distance, -1.0, 1.0));
}

Shape rotation_sweep(const Shape& ball, double delta, const SweepPlane& plane) {
    check_delta(delta);
    const auto [c, r] = ball_geometry(ball);
    const PlaneFrame fr = frame_in_plane(c, plane);
    if (delta == 0.0) return ball;
    if (!(delta < max_sweep_angle(fr.R, r))) {
        throw GeometryError("sweep angle too large: swept region is not star-shaped");
    }
    return Shape(ShapeKind::rotation_sweep, ball.dimension(), rotated_params(ball, delta, plane, fr.R),
                 {std::make_shared<detail::SweepRegion>(fr.R, r, fr.theta, fr.nu, delta)});
}

Shape lens(const Shape& ball, double delta, const SweepPlane& plane) {
    check_delta(delta);
    const auto [c, r] = ball_geometry(ball);
    const PlaneFrame fr = frame_in_plane(c, plane);
    if (delta == 0.0) return ball;
    const double d = 2.0 * fr.R * std::sin(0.5 * delta);
    if (d >= 2.0 * r) throw GeometryError("lens is empty: rotated ball no longer meets the ball");
    const Point c1 = fr.R * (std::cos(delta) * fr.theta + std::sin(delta) * fr.nu);
    return Shape(ShapeKind::lens, ball.dimension(), rotated_params(ball, delta, plane, fr.R),
                 {std::make_shared<detail::LensRegion>(c, c1, r)});
}

Shape polar_shape(const Point& centre, const std::vector<double>& coeffs, double r_min) {
    if (centre.size() != 2) throw DomainError("polar shapes are planar");
    if (coeffs.empty()) throw DomainError("polar shape needs at least r0");
    auto region = std::make_shared<detail::PolarRegion>(centre, coeffs);
    constexpr int kScan = 4096;
    for (int i = 0; i < kScan; ++i) {
        const double t = 2.0 * kPi * i / kScan;
        const double r = region->radius_at(t);
        if (!(r >= r_min)) {
            throw DomainError("polar radius " + std::to_string(r) + " below r_min at angle " +
                              std::to_string(t));
        }
    }
    return Shape(ShapeKind::polar2d, 2, {{"centre", point_json(centre)}, {"coeffs", coeffs}},
                 {region});
}

double part_gap(const StarRegion& a, const StarRegion& b) {
    const double centres = (a.star_centre() - b.star_centre()).norm();
    const double coarse = centres - a.bounding_radius() - b.bounding_radius();
    if (coarse > 0) return coarse;

    const int n = a.dimension();
    const auto dirs = n == 2 ? direction_mesh(2, 2048) : direction_mesh(n, 2048);
    auto samples = [&dirs](const StarRegion& s) {
        std::vector<Point> pts;
        pts.reserve(dirs.size());
        for (const auto& w : dirs) pts.push_back(s.star_centre() + s.exit_distance(w) * w);
        return pts;
    };
    const auto pa = samples(a);
    const auto pb = samples(b);
    for (const auto& p : pa) {
        if (b.contains(p)) return -1.0;
    }
    for (const auto& p : pb) {
        if (a.contains(p)) return -1.0;
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pa) {
        for (const auto& q : pb) best = std::min(best, (p - q).norm());
    }
    return best;
}

Shape union_of(const std::vector<Shape>& members, double gap_min) {
    if (members.empty()) throw DomainError("union needs at least one member");
    const int n = members.front().dimension();
    std::vector<RegionPtr> parts;
    std::vector<std::size_t> owner;
    nlohmann::json list = nlohmann::json::array();
    for (std::size_t m = 0; m < members.size(); ++m) {
        if (members[m].dimension() != n) throw DomainError("union members differ in dimension");
        for (const auto& p : members[m].parts()) {
            parts.push_back(p);
            owner.push_back(m);
        }
        list.push_back(members[m].to_json());
    }
    for (std::size_t i = 0; i < parts.size(); ++i) {
        for (std::size_t j = i + 1; j < parts.size(); ++j) {
            if (owner[i] == owner[j]) continue;
            const double g = part_gap(*parts[i], *parts[j]);
            if (g < gap_min) {
                throw GeometryError("union members " + std::to_string(owner[i]) + " and " +
                                    std::to_string(owner[j]) + " are closer than gap_min");
            }
        }
    }
    return Shape(ShapeKind::union_list, n, {{"members", list}, {"gap_min", gap_min}},
                 std::move(parts));
}

std::vector<std::vector<Point>> boundary_polylines(const Shape& shape, int segments) {
    if (shape.dimension() != 2) throw DomainError("boundary polylines need a planar shape");
    std::vector<std::vector<Point>> out;
    for (const auto& part : shape.parts()) {
        std::vector<Point> poly;
        poly.reserve(segments);
        for (int i = 0; i < segments; ++i) {
            const Point w = polar_direction(2.0 * kPi * i / segments);
            poly.push_back(part->star_centre() + part->exit_distance(w) * w);
        }
        out.push_back(std::move(poly));
    }
    return out;
}

std::string to_svg(const Shape& shape, int segments) {
    const auto polys = boundary_polylines(shape, segments);
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& poly : polys) {
        for (const auto& p : poly) {
            xmin = std::min(xmin, p(0));
            xmax = std::max(xmax, p(0));
            ymin = std::min(ymin, p(1));
            ymax = std::max(ymax, p(1));
        }
    }
    const double pad = 0.05 * std::max(xmax - xmin, ymax - ymin);
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9g", v);
        return std::string(buf);
    };
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << num(xmin - pad) << ' '
        << num(-ymax - pad) << ' ' << num(xmax - xmin + 2 * pad) << ' '
        << num(ymax - ymin + 2 * pad) << "\">\n";
    for (const auto& poly : polys) {
        svg << "  <path fill=\"none\" stroke=\"black\" stroke-width=\""
            << num(0.002 * std::max(xmax - xmin, ymax - ymin)) << "\" d=\"";
        for (std::size_t i = 0; i < poly.size(); ++i) {
            svg << (i == 0 ? "M" : " L") << num(poly[i](0)) << ' ' << num(-poly[i](1));
        }
        svg << " Z\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace isolab
