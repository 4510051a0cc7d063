// RANK (best/rest decision scoring), TEST curves, smoothing and keys.
#pragma once

#include <array>
#include <vector>

#include "shortkit/optimizer.hpp"
#include "shortkit/stats.hpp"

namespace shortkit {

struct BoreScore {
    double support = 0.0;
    double probability = 0.0;
};
BoreScore bore_score(double n1, double n2);

struct DecisionScore {
    Decision decision;
    std::array<double, kObjectives> support{};
    std::array<double, kObjectives> probability{};
    double value = 0.0;
};

struct RankConfig {
    OptimizerConfig optimizer;
    int runs = 20;
    double best_fraction = 0.1;
    bool per_run_n2 = false;  // n2 = runs - n1 instead of pooled count - n1
};

struct RankResult {
    std::vector<DecisionScore> ordering;  // one entry per leaf, best polarity
    std::size_t pooled = 0;
    std::uint64_t evaluations = 0;
};

// Decisions a solution stands for: its priors plus leaves at +-1.
std::vector<Decision> solution_decisions(const GoalModel& model, const Solution& s);

// Scores pooled individuals; `run_of` gives each member's run for per-run n2.
std::vector<DecisionScore> score_decisions(const GoalModel& model,
                                           std::span<const Individual> pooled,
                                           std::span<const int> run_of, const RankConfig& cfg);

// Pinned decisions (cfg.optimizer.pinned) are forced in every run and left
// out of the ordering.
RankResult rank(const GoalModel& model, const CostAssignment& costs, const RankConfig& cfg,
                std::uint64_t seed);

struct CurvePoint {
    int x = 0;
    std::array<double, kObjectives> median{}, iqr{};
    std::array<double, kObjectives> median_smoothed{}, iqr_smoothed{};
    std::array<std::vector<double>, kObjectives> raw;
};

struct TestCurve {
    Prior pinned;                 // forced before every prefix
    std::vector<Decision> decisions;
    std::vector<CurvePoint> points;  // x = 0..|decisions|
    int samples = 20;
    ObjectiveMask mask;
    bool smoothed = false;
    std::array<int, kObjectives> segments{};
};

struct TestConfig {
    int samples = 20;
    bool redraw_costs = false;  // fresh CostAssignment per sample
    SampleOptions sample;
    ObjectiveMask mask;
};

TestCurve test_curve(const GoalModel& model, const CostAssignment& costs,
                     std::span<const Decision> ordering, const TestConfig& cfg,
                     std::uint64_t seed, const Prior& pinned = {});

inline ScottKnottConfig curve_sk_config() {
    ScottKnottConfig c;
    c.sort_by_mean = false;
    return c;
}
// Pools consecutive x positions that Scott-Knott cannot tell apart.
TestCurve smooth_curve(const TestCurve& curve, const ScottKnottConfig& cfg = curve_sk_config());

struct KeyReport {
    std::vector<Decision> keys;
    int kappa = 0;
    int decisions = 0;
    bool collapsed = true;
    std::array<double, kObjectives> baseline{}, residual{}, ratio{};
    ObjectiveMask mask;
    double threshold = 0.1;
    double fraction() const { return decisions ? static_cast<double>(kappa) / decisions : 0.0; }
};

KeyReport detect_keys(const TestCurve& curve, double threshold = 0.1);

}  // namespace shortkit
