#include <limits>

#include "isolab/measures.hpp"
#include "regions.hpp"

namespace isolab {

Shape truncate_and_compensate(const Shape& E, double R, const ScalarDensity& f, double V,
                              const Point& far_direction, double far_distance,
                              const CompensationConfig& cfg) {
    const int n = E.dimension();
    if (!(V > 0)) throw DomainError("target volume must be positive");
    if (far_direction.size() != n || !(far_direction.norm() > 0)) {
        throw DomainError("far direction must be a nonzero vector of the shape's dimension");
    }
    if (!(far_distance > 0)) throw DomainError("far distance must be positive");
    const Point e = far_direction.normalized();

    std::vector<RegionPtr> kept;
    bool changed = false;
    for (const auto& part : E.parts()) {
        const double c = part->star_centre().norm();
        const double b = part->bounding_radius();
        if (std::isinf(R) || c + b <= R) {
            kept.push_back(part);
        } else if (c - b >= R) {
            changed = true;
        } else {
            kept.push_back(std::make_shared<detail::ClippedRegion>(part, R));
            changed = true;
        }
    }

    MeasureConfig mcfg;
    double inside = 0.0;
    if (!kept.empty()) {
        inside = weighted_volume(Shape(ShapeKind::truncated, n, {}, kept), f, mcfg).value;
    }
    const double tol = cfg.vol_tol * V;
    if (inside > V + tol) {
        throw CompensationError("truncated set already has f-volume " + std::to_string(inside) +
                                " above the target " + std::to_string(V));
    }
    const double deficit = V - inside;

    nlohmann::json params{{"source", E.to_json()},
                          {"R", std::isinf(R) ? nlohmann::json(nullptr) : nlohmann::json(R)},
                          {"target_volume", V},
                          {"far_distance", far_distance},
                          {"far_direction", std::vector<double>(e.data(), e.data() + n)}};

    if (deficit <= tol) {
        if (!changed) return E;
        params["far_radius"] = 0.0;
        return Shape(ShapeKind::truncated, n, params, kept);
    }

    auto far_ball = [&](double r) { return make_ball((far_distance + r) * e, r); };
    auto excess = [&](double r) {
        if (r <= 0) return -deficit;
        return weighted_volume(far_ball(r), f, mcfg).value - deficit;
    };
    double hi = 1.0;
    int grow = 0;
    while (excess(hi) < 0) {
        hi *= 2.0;
        if (++grow > 60) throw CompensationError("far-ball radius could not be bracketed");
    }
    const RootResult root = bracketed_root(excess, 0.0, hi, tol, 1e-15 * hi, cfg.max_iter);
    if (!root.converged) {
        throw CompensationError("far-ball radius search did not reach the volume tolerance");
    }
    const Shape ball = far_ball(root.root);
    for (const auto& part : kept) {
        if (part_gap(*part, *ball.parts().front()) < cfg.gap_min) {
            throw PlacementError("far ball overlaps the truncated set; increase far_distance");
        }
    }
    params["far_radius"] = root.root;
    params["far_centre"] = ball.params().at("centre");
    kept.push_back(ball.parts().front());
    return Shape(ShapeKind::truncated, n, params, kept);
}

double compensation_radius(const Shape& truncated) {
    if (truncated.kind() != ShapeKind::truncated) return 0.0;
    return truncated.params().value("far_radius", 0.0);
}

}  // namespace isolab
