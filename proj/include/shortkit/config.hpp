// Run configuration shared by the CLI (--config file) and the service
// (session "config" object). Unknown keys are rejected.
#pragma once

#include <string_view>

#include <json.hpp>

#include "shortkit/nsga2.hpp"

namespace shortkit {

struct RunConfig {
    PipelineConfig pipeline;
    CompareConfig compare;  // compare.pipeline mirrors `pipeline`
};

// Throws std::invalid_argument on malformed input.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig parse_run_config_text(std::string_view json_text);

// Fixed costs ({"leaf": cost, ...}, every leaf) or a triangular spec
// ({"distribution": [lo, mode, hi], "overrides": {"leaf": [lo, mode, hi]}}).
CostAssignment parse_costs(const GoalModel& model, std::string_view json_text, std::uint64_t seed);

// Costs used when nothing is supplied: one draw keyed off the run seed.
inline std::uint64_t cost_seed(std::uint64_t seed) { return derive_seed(seed, {1}); }

}  // namespace shortkit
