// Label propagation (step), stochastic labelling (sample) and exhaustive
// world enumeration for tiny models.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shortkit/model.hpp"
#include "shortkit/rng.hpp"

namespace shortkit {

// Label of N_k expected across an edge from a labelled N_i.
Label expectation(Label source, EdgeKind edge);

// A prior decision: a leaf (or any node) forced to Satisfied or Denied.
struct Decision {
    NodeIndex node = 0;
    Label polarity = Label::Satisfied;

    bool operator==(const Decision&) const = default;
    auto operator<=>(const Decision& o) const {
        if (node != o.node) return node <=> o.node;
        return static_cast<int>(polarity) <=> static_cast<int>(o.polarity);
    }
};
using Prior = std::vector<Decision>;

Decision parse_decision(const GoalModel& model, std::string_view text);  // "id" or "id:denied"
std::string format_decision(const GoalModel& model, const Decision& d);

inline constexpr std::size_t kObjectives = 4;
inline constexpr std::array<const char*, kObjectives> kObjectiveNames = {
    "o1-cost", "o2-ignored", "o3-goals", "o4-softgoals"};

struct ObjectiveVector {
    double cost = 0.0;
    int ignored = 0;
    int goals = 0;
    int softgoals = 0;

    double operator[](std::size_t j) const {
        switch (j) {
            case 0: return cost;
            case 1: return ignored;
            case 2: return goals;
            default: return softgoals;
        }
    }
    bool operator==(const ObjectiveVector&) const = default;
};

// Which of o1..o4 take part in optimisation, ranking and key detection.
struct ObjectiveMask {
    std::array<bool, kObjectives> on{true, true, true, true};

    std::size_t count() const;
    bool any() const { return count() > 0; }
    bool operator==(const ObjectiveMask&) const = default;
};
ObjectiveMask parse_objectives(std::string_view csv);  // "o1,o3" style
std::string format_objectives(const ObjectiveMask& m);

struct Solution {
    std::vector<Label> labels;  // by NodeIndex
    int ignored_count = 0;
    ObjectiveVector objectives;
    Prior prior_used;

    std::vector<NodeIndex> satisfied() const;
    std::vector<NodeIndex> denied() const;
    bool operator==(const Solution&) const = default;
};

struct SampleOptions {
    bool roots_only_goals = false;  // o3 counts only root hardgoals
};

// Mutable propagation state over one model. Reusable across samples.
class Propagator {
public:
    explicit Propagator(const GoalModel& model);

    void reset();
    // Forces a label and marks the node as fixed (never reset by AND checks).
    void fix(NodeIndex n, Label l);
    void set(NodeIndex n, Label l) { labels_[n] = l; }
    // Propagates from a labelled node. rng == nullptr walks edges in file order.
    void step(NodeIndex n, Rng* rng);

    Label label(NodeIndex n) const { return labels_[n]; }
    const std::vector<Label>& labels() const { return labels_; }
    bool ignored(EdgeIndex e) const { return ignored_[e] != 0; }
    int ignored_count() const { return ignored_count_; }

    // True when the labels at both ends of e are compatible.
    bool edge_consistent(EdgeIndex e) const;

private:
    std::optional<Label> wanted(NodeIndex from, EdgeIndex e) const;
    void ignore(EdgeIndex e);
    void check_and(NodeIndex n, std::size_t set_base);

    const GoalModel* model_;
    std::vector<Label> labels_;
    std::vector<std::uint8_t> ignored_;
    std::vector<std::uint8_t> fixed_;
    std::vector<std::uint8_t> was_reset_;
    int ignored_count_ = 0;
    std::vector<EdgeIndex> order_scratch_;
    std::vector<NodeIndex> set_scratch_;
};

ObjectiveVector score(const GoalModel& model, const std::vector<Label>& labels, int ignored,
                      const CostAssignment& costs, const SampleOptions& opt = {});

// Throws ModelError for priors that name nodes outside the model.
Solution sample(const GoalModel& model, const Prior& prior, const CostAssignment& costs,
                Rng& rng, const SampleOptions& opt = {});
// Same, reusing a caller-owned propagator (hot path of the batch kernels).
Solution sample(Propagator& prop, const GoalModel& model, const Prior& prior,
                const CostAssignment& costs, Rng& rng, const SampleOptions& opt = {});

// Every satisfy/deny assignment of the leaves, propagated in canonical order.
std::vector<Solution> enumerate_worlds(const GoalModel& model, const CostAssignment& costs,
                                       int max_leaves = 20, const SampleOptions& opt = {});

// Pareto: a is no worse everywhere and better somewhere (o1,o2 minimised).
bool pareto_dominates(const ObjectiveVector& a, const ObjectiveVector& b,
                      const ObjectiveMask& mask = {});

}  // namespace shortkit
