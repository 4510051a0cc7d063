// Synthetic goal models with planted keys. Every model is built from three
// parts: one domain whose cheap leaf must be satisfied, domains whose risky
// leaf must be denied, and filler (leaf clusters, supporting softgoals) that
// the keys settle.
#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "shortkit/inference.hpp"

namespace shortkit {

struct GenSpec {
    int nodes = 53;
    int keys = 3;
    std::uint64_t seed = 1;
    // makes / helps / hurts / breaks, for edges into supporting softgoals
    std::array<double, 4> edge_mix{0.6, 0.3, 0.05, 0.05};
    double and_ratio = 0.7;          // filler cluster heads that are AND (else OR)
    double softgoal_fraction = 0.2;  // of the node target, as supporting softgoals
};

struct GeneratedModel {
    GoalModel model;
    Prior keys;  // planted, satisfied key first
};

// Smallest node count that can hold `keys` planted keys.
int min_nodes_for(int keys);

GeneratedModel generate_model(const GenSpec& spec);

GenSpec parse_gen_spec(std::string_view json_text);
std::string gen_spec_json(const GenSpec& spec);

}  // namespace shortkit
