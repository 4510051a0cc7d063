#include <doctest.h>

#include <set>

#include "shortkit/generator.hpp"
#include "shortkit/pipeline.hpp"

using namespace shortkit;

namespace {

GenSpec spec_of(int nodes, int keys, std::uint64_t seed) {
    GenSpec s;
    s.nodes = nodes;
    s.keys = keys;
    s.seed = seed;
    return s;
}

}  // namespace

TEST_CASE("generated models validate and hit the node target") {
    for (int nodes : {50, 100, 200, 400})
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            auto g = generate_model(spec_of(nodes, 3 + nodes / 100, seed));
            CHECK(validate(g.model).empty());
            CHECK(g.model.node_count() == static_cast<std::size_t>(nodes));
            CHECK(g.keys.size() == static_cast<std::size_t>(3 + nodes / 100));
            for (const auto& k : g.keys) CHECK(g.model.kind(k.node) == NodeKind::Leaf);
        }
}

TEST_CASE("generation is deterministic per seed and round-trips through text") {
    auto a = generate_model(spec_of(120, 4, 9));
    auto b = generate_model(spec_of(120, 4, 9));
    auto c = generate_model(spec_of(120, 4, 10));
    CHECK(render_text(a.model) == render_text(b.model));
    CHECK(a.keys == b.keys);
    CHECK(render_text(a.model) != render_text(c.model));
    CHECK(parse_model(render_text(a.model)) == a.model);
}

TEST_CASE("tiny spec gives a single-key tree") {
    auto g = generate_model(spec_of(5, 1, 3));
    CHECK(validate(g.model).empty());
    CHECK(g.model.node_count() == 5);
    REQUIRE(g.keys.size() == 1);
    CHECK(g.keys[0].polarity == Label::Satisfied);
    CHECK(g.model.roots().size() == 1);
}

TEST_CASE("infeasible or malformed specs are refused") {
    CHECK_THROWS_AS(generate_model(spec_of(20, 5, 1)), std::invalid_argument);
    CHECK_THROWS_AS(generate_model(spec_of(50, 0, 1)), std::invalid_argument);
    auto s = spec_of(60, 3, 1);
    s.edge_mix = {0.5, 0.5, 0.5, 0.0};
    CHECK_THROWS_AS(generate_model(s), std::invalid_argument);
    s = spec_of(60, 3, 1);
    s.and_ratio = 1.5;
    CHECK_THROWS_AS(generate_model(s), std::invalid_argument);
}

TEST_CASE("spec json round trip") {
    auto s = spec_of(77, 4, 123);
    s.softgoal_fraction = 0.25;
    auto t = parse_gen_spec(gen_spec_json(s));
    CHECK(t.nodes == 77);
    CHECK(t.keys == 4);
    CHECK(t.seed == 123);
    CHECK(t.softgoal_fraction == doctest::Approx(0.25));
    CHECK_THROWS(parse_gen_spec("{\"nodes\": \"many\"}"));
}

TEST_CASE("planted keys collapse every objective's spread") {
    for (int nodes : {53, 150}) {
        auto g = generate_model(spec_of(nodes, 3, 5));
        auto costs = sample_costs(g.model, 1);
        auto c = test_curve(g.model, costs, g.keys, TestConfig{}, 2);
        const auto& base = c.points.front();
        const auto& keyed = c.points.back();
        for (std::size_t j = 0; j < kObjectives; ++j) {
            if (base.iqr[j] == 0) continue;
            CHECK(keyed.iqr[j] <= 0.1 * base.iqr[j]);
        }
        CHECK(base.iqr[0] > 0);  // there is something to collapse
    }
}

TEST_CASE("pipeline finds about three keys on a fixture-sized model") {
    auto g = generate_model(spec_of(53, 3, 2));
    auto costs = sample_costs(g.model, derive_seed(2, {1}));
    auto p = run_pipeline(g.model, costs, PipelineConfig{}, 2);
    CHECK(p.keys.collapsed);
    CHECK(p.keys.kappa >= 2);
    CHECK(p.keys.kappa <= 4);
    std::set<Decision> planted(g.keys.begin(), g.keys.end());
    int hits = 0;
    for (int i = 0; i < 3; ++i) hits += planted.count(p.keys.keys.size() > std::size_t(i) ? p.keys.keys[i] : Decision{});
    CHECK(hits >= 2);
}
