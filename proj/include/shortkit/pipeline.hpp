// The full analysis: rank decisions, build the TEST curve, smooth it and read
// off the keys.
#pragma once

#include <cstdint>

#include "shortkit/ranking.hpp"

namespace shortkit {

struct PipelineConfig {
    RankConfig rank;
    TestConfig test;
    ObjectiveMask objectives;  // copied into both the rank and test configs
    double key_threshold = 0.1;
};

struct PipelineResult {
    RankResult ranking;
    TestCurve curve;  // smoothed
    KeyReport keys;
    std::uint64_t evaluations = 0;  // sample() calls, rank plus test
    double seconds = 0.0;
};

// Sub-seeds: rank derive_seed(seed, {2}), test derive_seed(seed, {3}).
PipelineResult run_pipeline(const GoalModel& model, const CostAssignment& costs,
                            const PipelineConfig& cfg, std::uint64_t seed,
                            const Prior& pinned = {});

std::vector<Decision> ordering_decisions(const RankResult& r);

}  // namespace shortkit
