#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isolab/constructions.hpp"
#include "isolab/measures.hpp"
#include "isolab/profile.hpp"

namespace isolab {

using Json = nlohmann::json;

/// Sorted keys, doubles as %.17g, non-finite numbers as null, two-space indent.
std::string dump_stable(const Json& j);

Json to_json(const MeasureResult& r);
Json to_json(const Certificate& c);
Json to_json(const ConditionReport& r);
Json to_json(const ConstructionResult& r);
Json to_json(const ExistenceReport& r);
Json to_json(const ProfilePoint& p);
Json to_json(const std::vector<FarBallPoint>& curve);
Json to_json(const CounterexampleReport& r);
Json to_json(const SlicingResult& r);

/// CSV writers; every table starts with its header row.
std::string far_ball_csv(const std::vector<FarBallPoint>& curve);
std::string tau_csv(const std::vector<TauSample>& tau);
std::string trace_csv(const std::vector<TraceRow>& trace);
std::string samples_csv(const std::vector<SampleRecord>& samples);

/// Appends a `# scenario=<hash> seed=<seed>` line to a CSV table.
std::string stamp_csv(std::string csv, const std::string& hash, std::uint64_t seed);
/// Inserts the same stamp as a comment after the opening svg tag.
std::string stamp_svg(std::string svg, const std::string& hash, std::uint64_t seed);

}  // namespace isolab
