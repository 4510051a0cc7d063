#include "shortkit/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace shortkit {

namespace {

struct Builder {
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    std::vector<NodeIndex> roots;

    NodeIndex add(std::string id, NodeKind kind, std::string name, bool root = false) {
        nodes.push_back({std::move(id), std::move(name), kind});
        const auto i = static_cast<NodeIndex>(nodes.size() - 1);
        if (root) roots.push_back(i);
        return i;
    }
    void edge(NodeIndex p, NodeIndex c, EdgeKind k) { edges.push_back({p, c, k}); }
};

std::string tag(const char* prefix, int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%03d", prefix, i);
    return buf;
}

constexpr int kDenyDomain = 9;  // effort, key, tooling, 2 pilots, guard, qualification, 2 envs

EdgeKind pick_kind(const std::array<double, 4>& mix, Rng& rng) {
    static constexpr EdgeKind kinds[4] = {EdgeKind::Makes, EdgeKind::Helps, EdgeKind::Hurts,
                                          EdgeKind::Breaks};
    double u = rng.uniform();
    for (int i = 0; i < 3; ++i) {
        if (u < mix[i]) return kinds[i];
        u -= mix[i];
    }
    return kinds[3];
}

void check_spec(const GenSpec& s) {
    if (s.keys < 1) throw std::invalid_argument("generator needs at least one planted key");
    if (s.nodes < min_nodes_for(s.keys))
        throw std::invalid_argument("infeasible spec: " + std::to_string(s.keys) +
                                    " keys need at least " + std::to_string(min_nodes_for(s.keys)) +
                                    " nodes, got " + std::to_string(s.nodes));
    double sum = 0;
    for (double p : s.edge_mix) {
        if (p < 0) throw std::invalid_argument("edge mix probabilities must be non-negative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("edge mix must sum to 1");
    if (s.and_ratio < 0 || s.and_ratio > 1) throw std::invalid_argument("and_ratio must be in [0,1]");
    if (s.softgoal_fraction < 0 || s.softgoal_fraction >= 1)
        throw std::invalid_argument("softgoal_fraction must be in [0,1)");
}

}  // namespace

int min_nodes_for(int keys) { return keys <= 1 ? 5 : 9 + kDenyDomain * (keys - 1); }

GeneratedModel generate_model(const GenSpec& spec) {
    check_spec(spec);
    Rng rng(derive_seed(spec.seed, {0x6e6e}));
    Builder b;
    GeneratedModel out;
    int budget = spec.nodes;
    const int deny_domains = spec.keys - 1;

    // Domain 0: the cheap leaf satisfies the root through an OR; the costly
    // alternative is blocked once the quality softgoal holds.
    const bool compact = deny_domains == 0 && budget < 11;
    int alternatives = compact ? budget - 4 : std::clamp(budget - 7 - kDenyDomain * deny_domains, 2, 4);
    const auto root = b.add("d000_goal", NodeKind::Hardgoal, "Primary goal", true);
    const auto choice = b.add("d000_choice", NodeKind::Or, "Platform choice");
    const auto key = b.add("d000_key", NodeKind::Leaf, "Standard platform");
    const auto alt = b.add("d000_custom", NodeKind::Or, "Custom build");
    b.edge(root, choice, EdgeKind::Makes);
    b.edge(choice, key, EdgeKind::Makes);
    b.edge(choice, alt, EdgeKind::Makes);
    std::vector<NodeIndex> alt_leaves;
    for (int i = 0; i < alternatives; ++i) {
        alt_leaves.push_back(b.add(tag("d000_option", i + 1), NodeKind::Leaf, "Custom option " + std::to_string(i + 1)));
        b.edge(alt, alt_leaves.back(), EdgeKind::Makes);
    }
    out.keys.push_back({key, Label::Satisfied});
    std::vector<NodeIndex> support_targets;  // nodes a supporting softgoal may point at
    if (!compact) {
        const auto quality = b.add("d000_quality", NodeKind::Softgoal, "Portability");
        const auto review = b.add("d000_review", NodeKind::And, "Build vs buy review");
        const auto showcase = b.add("d000_showcase", NodeKind::Hardgoal, "Showcase", true);
        b.edge(quality, key, EdgeKind::Makes);
        b.edge(quality, review, EdgeKind::Helps);
        b.edge(review, alt, EdgeKind::Hurts);
        b.edge(showcase, quality, EdgeKind::Makes);
        support_targets.push_back(quality);
    } else {
        support_targets.push_back(choice);
    }
    budget -= static_cast<int>(b.nodes.size());

    // Deny domains: the risky leaf feeds an effort nobody asks for, and a guard
    // hardgoal holds only when it is dropped.
    std::vector<NodeIndex> efforts;
    for (int d = 1; d <= deny_domains; ++d) {
        const std::string p = tag("d", d) + "_";
        auto id = [&](const char* s) { return p + s; };
        const auto effort = b.add(id("effort"), NodeKind::And, "Integration effort " + std::to_string(d));
        const auto risky = b.add(id("key"), NodeKind::Leaf, "Risky component " + std::to_string(d));
        const auto tooling = b.add(id("tooling"), NodeKind::And, "Tooling " + std::to_string(d));
        const auto guard = b.add(id("guard"), NodeKind::Hardgoal, "Quality guard " + std::to_string(d));
        const auto qual = b.add(id("qualify"), NodeKind::Or, "Qualification " + std::to_string(d));
        b.edge(effort, risky, EdgeKind::Makes);
        b.edge(effort, tooling, EdgeKind::Helps);
        b.edge(guard, risky, EdgeKind::Breaks);
        b.edge(guard, qual, EdgeKind::Makes);
        b.edge(qual, risky, EdgeKind::Breaks);
        for (int i = 1; i <= 2; ++i) {
            const auto pilot = b.add(id("pilot") + std::to_string(i), NodeKind::Leaf, "Pilot " + std::to_string(i));
            b.edge(tooling, pilot, EdgeKind::Makes);
        }
        for (int i = 1; i <= 2; ++i) {
            const auto env = b.add(id("env") + std::to_string(i), NodeKind::Leaf, "Test env " + std::to_string(i));
            b.edge(tooling, env, EdgeKind::Makes);
            b.edge(qual, env, EdgeKind::Makes);
        }
        budget -= kDenyDomain;
        // half the guards answer to a root goal of their own
        if (budget > 0 && rng.uniform() < 0.5) {
            const auto top = b.add(id("goal"), NodeKind::Hardgoal, "Business goal " + std::to_string(d), true);
            b.edge(top, guard, EdgeKind::Makes);
            --budget;
        }
        efforts.push_back(effort);
        support_targets.push_back(guard);
        out.keys.push_back({risky, Label::Denied});
    }

    // Filler: supporting softgoals, then leaf clusters under the efforts; any
    // remainder too small for a cluster becomes softgoals (or custom options).
    int softgoals = std::min(budget, static_cast<int>(std::lround(spec.softgoal_fraction * spec.nodes)));
    int cluster_budget = budget - softgoals;
    int cluster_no = 0;
    while (!efforts.empty() && cluster_budget >= 3) {
        int m = 2 + static_cast<int>(rng.below(3));
        m = std::min(m, cluster_budget - 1);
        if (cluster_budget - (m + 1) > 0 && cluster_budget - (m + 1) < 3) m = cluster_budget - 1;  // absorb the tail
        ++cluster_no;
        const bool is_and = rng.uniform() < spec.and_ratio;
        const auto head = b.add(tag("c", cluster_no) + "_group", is_and ? NodeKind::And : NodeKind::Or,
                                "Shared service " + std::to_string(cluster_no));
        b.edge(efforts[rng.below(efforts.size())], head, EdgeKind::Helps);
        for (int i = 1; i <= m; ++i) {
            const auto leaf = b.add(tag("c", cluster_no) + "_item" + std::to_string(i), NodeKind::Leaf,
                                    "Service item " + std::to_string(i));
            b.edge(head, leaf, EdgeKind::Makes);
        }
        cluster_budget -= m + 1;
    }
    if (efforts.empty()) {
        // one-key models grow by custom options instead of clusters
        for (; cluster_budget > 0; --cluster_budget) {
            const int i = static_cast<int>(alt_leaves.size()) + 1;
            alt_leaves.push_back(b.add(tag("d000_option", i), NodeKind::Leaf, "Custom option " + std::to_string(i)));
            b.edge(alt, alt_leaves.back(), EdgeKind::Makes);
        }
    }
    softgoals += cluster_budget;
    for (int i = 1; i <= softgoals; ++i) {
        const auto target = support_targets[rng.below(support_targets.size())];
        const auto s = b.add(tag("s", i), NodeKind::Softgoal, "Quality attribute " + std::to_string(i));
        b.edge(s, target, pick_kind(spec.edge_mix, rng));
        support_targets.push_back(s);
    }

    out.model = GoalModel(std::move(b.nodes), std::move(b.edges), std::move(b.roots));
    auto bad = validate(out.model);
    if (!bad.empty())  // construction bug, not a user error
        throw std::logic_error("generator produced an invalid model: " + bad.front().subject + ": " +
                               bad.front().rule);
    return out;
}

GenSpec parse_gen_spec(std::string_view json_text) {
    GenSpec s;
    try {
        auto j = nlohmann::json::parse(json_text);
        if (!j.is_object()) throw std::invalid_argument("generator spec must be a JSON object");
        if (j.contains("nodes")) s.nodes = j.at("nodes").get<int>();
        if (j.contains("keys")) s.keys = j.at("keys").get<int>();
        if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("edge_mix")) s.edge_mix = j.at("edge_mix").get<std::array<double, 4>>();
        if (j.contains("and_ratio")) s.and_ratio = j.at("and_ratio").get<double>();
        if (j.contains("softgoal_fraction")) s.softgoal_fraction = j.at("softgoal_fraction").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad generator spec: ") + e.what());
    }
    check_spec(s);
    return s;
}

std::string gen_spec_json(const GenSpec& s) {
    nlohmann::ordered_json j;
    j["nodes"] = s.nodes;
    j["keys"] = s.keys;
    j["seed"] = s.seed;
    j["edge_mix"] = s.edge_mix;
    j["and_ratio"] = s.and_ratio;
    j["softgoal_fraction"] = s.softgoal_fraction;
    return j.dump(2);
}

}  // namespace shortkit
