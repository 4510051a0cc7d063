// Differential evolution over prior decision sets, compared with continuous
// domination (cdom).
#pragma once

#include <array>
#include <vector>

#include "shortkit/inference.hpp"

namespace shortkit {

using Normalised = std::array<double, kObjectives>;

struct OptimizerConfig {
    int pop_multiplier = 10;
    double p1 = 0.5;
    int max_generations = 100;
    // w_j: -1 minimise, +1 maximise
    std::array<double, kObjectives> directions{-1.0, -1.0, 1.0, 1.0};
    ObjectiveMask enabled;
    SampleOptions sample;
    // Chance that an initial member leaves a leaf undecided; the rest is
    // split evenly between satisfy and deny. Kept high so populations start
    // sparse and grow by mutation.
    double init_free = 0.95;
    // Forced into every member's prior (what-if pins).
    Prior pinned;
};

struct Individual {
    Prior prior;
    Solution solution;
};

struct OptimizeResult {
    std::vector<Individual> population;
    int generations = 0;             // generations run
    std::vector<int> replacements;   // per generation
    std::uint64_t evaluations = 0;   // sample() calls
};

// Per-objective min/max over a set of vectors; constant objectives map to 0.
class Normaliser {
public:
    Normaliser() { lo_.fill(0.0); hi_.fill(0.0); }
    void fit(std::span<const ObjectiveVector> vs);
    void extend(const ObjectiveVector& v);
    Normalised operator()(const ObjectiveVector& v) const;

private:
    std::array<double, kObjectives> lo_, hi_;
    bool empty_ = true;
};

// loss(x,y) = sum_j -exp(w_j (x_j - y_j) / n) / n over enabled objectives.
double cdom_loss(const Normalised& x, const Normalised& y, const OptimizerConfig& cfg);
// x beats y iff loss(y,x) > loss(x,y).
bool dominates(const Normalised& x, const Normalised& y, const OptimizerConfig& cfg);

// m_k = a_k or (p1 < rand() and (b_k or c_k)); a keeps its own decision on a
// clash, and a b/c clash on the same leaf resolves to the denial.
Prior mutate(const Prior& a, const Prior& b, const Prior& c, double p1, Rng& rng);

OptimizeResult optimize(const GoalModel& model, const CostAssignment& costs,
                        const OptimizerConfig& cfg, std::uint64_t seed);

// Index of the member with the least total loss against the rest.
std::size_t best_individual(std::span<const Individual> pop, const OptimizerConfig& cfg);

}  // namespace shortkit
