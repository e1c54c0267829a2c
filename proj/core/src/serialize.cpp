#include "isolab/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace isolab {

namespace {

std::string num(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void dump(const Json& j, std::string& out, int depth) {
    const std::string pad(2 * depth, ' ');
    const std::string inner(2 * (depth + 1), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            // nlohmann's default object type is an ordered std::map.
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += inner + Json(it.key()).dump() + ": ";
                dump(it.value(), out, depth + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += inner;
                dump(j[i], out, depth + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case Json::value_t::number_float:
            out += num(j.get<double>());
            return;
        default:
            out += j.dump();
    }
}

Json point(const Point& p) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(p(i));
    return a;
}

std::string row(std::initializer_list<std::string> cells) {
    std::string out;
    bool first = true;
    for (const auto& c : cells) {
        if (!first) out += ',';
        first = false;
        out += c;
    }
    return out + "\n";
}

}  // namespace

std::string dump_stable(const Json& j) {
    std::string out;
    dump(j, out, 0);
    return out + "\n";
}

Json to_json(const MeasureResult& r) {
    Json j{{"value", r.value}, {"error", r.error}, {"method", to_string(r.method)}, {"nodes", r.nodes}};
    if (r.seed) j["seed"] = *r.seed;
    return j;
}

Json to_json(const Certificate& c) {
    Json rows = Json::array();
    for (const auto& r : c.rows) {
        rows.push_back({{"name", r.name},
                        {"lhs", r.lhs},
                        {"relation", r.relation},
                        {"rhs", r.rhs},
                        {"slack", r.slack},
                        {"required", r.required},
                        {"holds", r.holds()}});
    }
    return rows;
}

Json to_json(const ConditionReport& r) {
    Json j{{"dimension", r.dimension},
           {"annulus",
            {{"inner_radius", r.annulus.inner_radius},
             {"outer_radius", r.annulus.outer_radius},
             {"radial_samples", r.annulus.radial_samples},
             {"angular_samples", r.annulus.angular_samples}}},
           {"convergence_class_f", to_string(r.convergence_class_f)},
           {"convergence_class_hplus", to_string(r.convergence_class_hplus)},
           {"ratio_min", r.ratio_min},
           {"ratio_max", r.ratio_max},
           {"threshold", r.threshold},
           {"tail_exponent", r.tail_exponent},
           {"boundedness_ratio", r.boundedness_ratio},
           {"verdict", to_string(r.verdict)},
           {"reason", r.reason}};
    j["tail_divergent"] = r.tail_divergent ? Json(*r.tail_divergent) : Json(nullptr);
    j["tail_confidence"] = r.tail_confidence ? Json(to_string(*r.tail_confidence)) : Json(nullptr);
    return j;
}

Json to_json(const ConstructionResult& r) {
    Json j{{"success", r.success},
           {"case", r.case_name},
           {"target_volume", r.target_volume},
           {"achieved_volume", r.achieved_volume},
           {"achieved_perimeter", r.achieved_perimeter},
           {"mean_density", r.mean_density},
           {"normalized_mean_density", r.normalized_mean_density},
           {"delta_bar", r.delta_bar},
           {"R", r.R},
           {"theta", point(r.theta)},
           {"scale", r.scale},
           {"certificate", to_json(r.certificate)},
           {"certificate_holds", r.certificate.all_hold()},
           {"note", r.note}};
    j["shape"] = r.shape ? r.shape->to_json() : Json(nullptr);
    if (r.circle) {
        j["circle"] = {{"u", point(r.circle->u)}, {"v", point(r.circle->v)}, {"mean_gap", r.circle->mean_gap}};
    }
    if (!r.tau.empty()) j["tau_samples"] = static_cast<int>(r.tau.size());
    return j;
}

Json to_json(const ExistenceReport& r) {
    Json j{{"conditions", to_json(r.conditions)}, {"overall", r.overall}, {"detail", r.detail}};
    j["verdict"] = r.detail.empty() ? r.overall : r.overall + ": " + r.detail;
    j["construction"] = r.construction ? to_json(*r.construction) : Json(nullptr);
    return j;
}

Json to_json(const ProfilePoint& p) {
    Json starts = Json::array();
    for (const auto& [d, P] : p.start_results) starts.push_back({{"centre_distance", d}, {"perimeter", P}});
    Json j{{"V", p.V},
           {"J_estimate", p.J_estimate},
           {"J_is_upper_bound", true},
           {"method", to_string(p.method)},
           {"best_centre_distance", p.best_centre_distance},
           {"start_results", starts},
           {"sanity_floor", p.sanity_floor},
           {"iterations", static_cast<int>(p.optimizer_trace.size())},
           {"warnings", p.warnings}};
    j["best_shape"] = p.best_shape ? p.best_shape->to_json() : Json(nullptr);
    return j;
}

Json to_json(const std::vector<FarBallPoint>& curve) {
    Json a = Json::array();
    for (const auto& p : curve) {
        Json e{{"R", p.R}, {"perimeter", p.perimeter}, {"radius", p.radius}, {"ok", p.ok}};
        if (!p.ok) e["error"] = p.error;
        a.push_back(e);
    }
    return a;
}

Json to_json(const CounterexampleReport& r) {
    auto checks = [](const std::vector<InequalityCheck>& v) {
        double worst = std::numeric_limits<double>::infinity();
        double min_ratio = std::numeric_limits<double>::infinity();
        for (const auto& c : v) {
            worst = std::min(worst, c.slack);
            if (c.rhs > 0) min_ratio = std::min(min_ratio, c.lhs / c.rhs);
        }
        return Json{{"count", static_cast<int>(v.size())}, {"worst_slack", worst}, {"min_lhs_over_rhs", min_ratio}};
    };
    Json j{{"M", r.M},
           {"seed", r.seed},
           {"samples_tested", r.samples_tested},
           {"min_perimeter_seen", r.min_perimeter_seen},
           {"far_ball_curve", to_json(r.far_ball_curve)},
           {"phi_bound", checks(r.phi_bound_checks)},
           {"phi_far_bound", checks(r.phi_far_bound_checks)},
           {"perimeter_failures", r.perimeter_failures},
           {"phi_bound_failures", r.phi_bound_failures},
           {"phi_far_bound_failures", r.phi_far_bound_failures},
           {"verdict_evidence", to_string(r.verdict_evidence)}};
    j["profile"] = r.profile ? to_json(*r.profile) : Json(nullptr);
    if (r.witness) {
        j["witness"] = {{"id", r.witness->id},
                        {"centre", point(r.witness->centre)},
                        {"coeffs", r.witness->coeffs},
                        {"perimeter", r.witness->perimeter}};
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

Json to_json(const SlicingResult& r) {
    return {{"perimeter", to_json(r.perimeter)}, {"volume", to_json(r.volume)}};
}

std::string far_ball_csv(const std::vector<FarBallPoint>& curve) {
    std::string out = "R,perimeter,radius\n";
    for (const auto& p : curve) out += row({num(p.R), num(p.perimeter), num(p.radius)});
    return out;
}

std::string tau_csv(const std::vector<TauSample>& tau) {
    std::string out = "theta,delta_bar,tau\n";
    for (const auto& t : tau) out += row({num(t.theta), num(t.delta_bar), num(t.theta + t.delta_bar)});
    return out;
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
    std::string out = "iteration,perimeter,volume_violation,centre_distance\n";
    for (const auto& t : trace) {
        out += row({std::to_string(t.iteration), num(t.perimeter), num(t.volume_violation), num(t.centre_distance)});
    }
    return out;
}

std::string samples_csv(const std::vector<SampleRecord>& samples) {
    std::string out = "id,centre_distance,perimeter,phi_perimeter,phi_volume,disjoint_from_unit_ball,inside_unit_ball\n";
    for (const auto& s : samples) {
        out += row({std::to_string(s.id), num(s.centre_distance), num(s.perimeter), num(s.phi_perimeter),
                    num(s.phi_volume), s.disjoint_from_unit_ball ? "1" : "0", s.inside_unit_ball ? "1" : "0"});
    }
    return out;
}

std::string stamp_csv(std::string csv, const std::string& hash, std::uint64_t seed) {
    return csv + "# scenario=" + hash + " seed=" + std::to_string(seed) + "\n";
}

std::string stamp_svg(std::string svg, const std::string& hash, std::uint64_t seed) {
    const auto pos = svg.find(">\n");
    const std::string note = "<!-- scenario=" + hash + " seed=" + std::to_string(seed) + " -->\n";
    if (pos == std::string::npos) return note + svg;
    return svg.insert(pos + 2, note);
}

}  // namespace isolab
