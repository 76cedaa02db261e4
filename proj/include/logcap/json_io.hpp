#pragma once

#include <filesystem>

#include <json.hpp>

#include "logcap/capacity_bounds.hpp"
#include "logcap/energy.hpp"
#include "logcap/interval_sets.hpp"
#include "logcap/measures.hpp"

namespace logcap {

using Json = nlohmann::json;

Json to_json(const Interval& j);
Json to_json(const IntervalUnion& u);
Json to_json(const StepMeasure& mu);
Json to_json(const EnergyBreakdown& e);
Json to_json(const BoundReport& b);

// Accepts {"center_num", "center_den", "log_half_length"} with an optional
// exact "half_length", or plain {"lo", "hi"} given as decimal or "a/b" strings.
Interval interval_from_json(const Json& j);
IntervalUnion interval_union_from_json(const Json& j);
// Prefers "piece_mass", then "log_density", then "density".
StepMeasure step_measure_from_json(const Json& j);
// {"log_lengths": [...]}, {"lengths": [...]}, or an interval union.
CoverDescription cover_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);

}  // namespace logcap
