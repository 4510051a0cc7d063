// NSGA-II over trit genomes (satisfy / deny / leave free per leaf), plus the
// harness that compares it with the SHORT pipeline.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shortkit/pipeline.hpp"

namespace shortkit {

enum class Trit : std::uint8_t { Free, Satisfy, Deny };
using Genome = std::vector<Trit>;  // one trit per leaf, in leaves() order

// Free leaves are left to sample(); pinned decisions replace the genome's.
Prior decode(const GoalModel& model, const Genome& g, const Prior& pinned = {});

struct Nsga2Config {
    int population = 100;
    int generations = 250;
    double crossover = 0.9;   // chance a pair is recombined (uniform, per trit 0.5)
    double mutation = -1.0;   // per-trit rate; negative means 1 / |leaves|
    std::uint64_t max_evaluations = 0;  // 0 = no cap
    ObjectiveMask enabled;
    SampleOptions sample;
    Prior pinned;
};

struct Nsga2Member {
    Genome genome;
    Solution solution;
    int rank = 0;
    double crowding = 0.0;
};

struct Nsga2Result {
    std::vector<Nsga2Member> population;
    std::vector<std::size_t> front;  // rank-0 members
    int generations = 0;
    std::uint64_t evaluations = 0;
};

// Fronts of indices, each sorted ascending; Pareto dominance on the mask.
std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<const ObjectiveVector> v,
                                                             const ObjectiveMask& mask = {});
// Aligned with `front`.
std::vector<double> crowding_distance(std::span<const ObjectiveVector> v,
                                      std::span<const std::size_t> front,
                                      const ObjectiveMask& mask = {});

Nsga2Result nsga2(const GoalModel& model, const CostAssignment& costs, const Nsga2Config& cfg,
                  std::uint64_t seed);

// Percent of hardgoals (f2) and softgoals (f1) satisfied; 100 when there are none.
struct Coverage {
    double softgoals = 0.0;
    double goals = 0.0;
};
Coverage coverage(const GoalModel& model, const ObjectiveVector& o, const SampleOptions& opt = {});

struct CompareConfig {
    int runs = 20;
    PipelineConfig pipeline;
    Nsga2Config nsga2;
    int replay_samples = 20;     // samples per recommended prior
    int curve_points_timed = 3;  // NSGA-II reruns actually timed per curve
};

struct MethodStats {
    MedianIqr f1, f2;  // percent
    std::vector<double> f1_runs, f2_runs, seconds;
    std::uint64_t evaluations = 0;  // total over runs
};

struct ComparisonReport {
    MethodStats short_method, nsga2;
    int runs = 0;
    std::uint64_t nsga2_budget = 0;  // evaluations per NSGA-II run
    std::size_t curve_points = 0;    // |d| + 1
    double short_curve_seconds = 0;  // median pipeline wall clock
    double nsga2_point_seconds = 0;  // mean of the timed reruns
    double nsga2_curve_seconds = 0;  // point time x curve points
    double speedup() const {
        return short_curve_seconds > 0 ? nsga2_curve_seconds / short_curve_seconds : 0.0;
    }
};

// SHORT's recommendation per run is its keys, NSGA-II's the front genome
// whose replay covers the most goals (then softgoals). Recommendations are
// replayed `replay_samples` times and the medians converted to percent.
// NSGA-II gets the same evaluation budget per run as one pipeline run.
ComparisonReport compare(const GoalModel& model, const CostAssignment& costs,
                         const CompareConfig& cfg, std::uint64_t seed);

std::string comparison_markdown(const ComparisonReport& r);

}  // namespace shortkit
