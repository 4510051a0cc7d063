#include <doctest.h>

#include <map>
#include <set>

#include "shortkit/inference.hpp"

using namespace shortkit;

namespace {

// Hand-written table of the three expectation rules, in label order
// satisfied, partial-sat, partial-den, denied against makes/helps/hurts/breaks.
const std::map<std::pair<Label, EdgeKind>, Label> kOracle = {
    {{Label::Satisfied, EdgeKind::Makes}, Label::Satisfied},
    {{Label::Satisfied, EdgeKind::Helps}, Label::PartialSat},
    {{Label::Satisfied, EdgeKind::Hurts}, Label::PartialDen},
    {{Label::Satisfied, EdgeKind::Breaks}, Label::Denied},
    {{Label::PartialSat, EdgeKind::Makes}, Label::PartialSat},
    {{Label::PartialSat, EdgeKind::Helps}, Label::PartialSat},
    {{Label::PartialSat, EdgeKind::Hurts}, Label::PartialDen},
    {{Label::PartialSat, EdgeKind::Breaks}, Label::PartialDen},
    {{Label::PartialDen, EdgeKind::Makes}, Label::PartialDen},
    {{Label::PartialDen, EdgeKind::Helps}, Label::PartialDen},
    {{Label::PartialDen, EdgeKind::Hurts}, Label::PartialSat},
    {{Label::PartialDen, EdgeKind::Breaks}, Label::PartialSat},
    {{Label::Denied, EdgeKind::Makes}, Label::Denied},
    {{Label::Denied, EdgeKind::Helps}, Label::PartialDen},
    {{Label::Denied, EdgeKind::Hurts}, Label::PartialSat},
    {{Label::Denied, EdgeKind::Breaks}, Label::Satisfied},
};

bool all_edges_consistent(const Propagator& p, const GoalModel& m) {
    for (EdgeIndex e = 0; e < m.edge_count(); ++e)
        if (!p.ignored(e) && !p.edge_consistent(e)) return false;
    return true;
}

const char* kMixed =
    "node r hardgoal root\nnode s softgoal root\nnode a and\nnode o or\n"
    "node x leaf\nnode y leaf\nnode z leaf\nnode w leaf\n"
    "edge r a makes\nedge r o helps\nedge a x makes\nedge a y makes\n"
    "edge o y makes\nedge o z makes\nedge s z breaks\nedge s w helps\nedge s a hurts\n";

}  // namespace

TEST_CASE("expectation truth table") {
    CHECK(kOracle.size() == 16);
    for (auto [key, want] : kOracle) {
        INFO(to_string(key.first), " ", to_string(key.second));
        CHECK(expectation(key.first, key.second) == want);
    }
}

TEST_CASE("step: single forced propagation") {
    auto m = parse_model("node g hardgoal root\nnode a leaf\nedge g a makes\n");
    Propagator p(m);
    p.set(0, Label::Satisfied);
    p.step(0, nullptr);
    CHECK(p.label(1) == Label::Satisfied);
    CHECK(p.ignored_count() == 0);
}

TEST_CASE("step: conflicting child keeps its label and the edge is ignored") {
    auto m = parse_model("node g hardgoal root\nnode a leaf\nedge g a makes\n");
    Propagator p(m);
    p.set(1, Label::Denied);
    p.set(0, Label::Satisfied);
    p.step(0, nullptr);
    CHECK(p.label(1) == Label::Denied);
    CHECK(p.ignored_count() == 1);
}

TEST_CASE("step: AND with a breaking child resets its children") {
    auto m = parse_model("node g and\nnode a leaf\nnode b leaf\nedge g a makes\nedge g b breaks\n");
    Rng rng(3);
    for (int rep = 0; rep < 10; ++rep) {
        Propagator p(m);
        p.set(0, Label::Satisfied);
        p.step(0, rep == 0 ? nullptr : &rng);
        CHECK(p.label(1) == Label::Undefined);
        CHECK(p.label(2) == Label::Undefined);
        CHECK(p.ignored_count() == 0);
    }
}

TEST_CASE("step: upward rules for AND, OR and contributions") {
    auto m = parse_model(
        "node r hardgoal root\nnode a and\nnode o or\nnode x leaf\nnode y leaf\nnode z leaf\n"
        "edge r a makes\nedge a x makes\nedge a y makes\nedge r o helps\nedge o z makes\n"
        "edge o y makes\n");
    auto ix = [&](const char* id) { return m.index_of(id); };
    {
        // One satisfied child is not enough for an AND.
        Propagator p(m);
        p.set(ix("x"), Label::Satisfied);
        p.step(ix("x"), nullptr);
        CHECK(p.label(ix("a")) == Label::Undefined);
        p.set(ix("y"), Label::Satisfied);
        p.step(ix("y"), nullptr);
        CHECK(p.label(ix("a")) == Label::Satisfied);
        CHECK(p.label(ix("r")) == Label::Satisfied);
        // r reaches o only through a helps edge
        CHECK(p.label(ix("o")) == Label::PartialSat);
        // the OR does not push its satisfaction down to z
        CHECK(p.label(ix("z")) == Label::Undefined);
    }
    {
        // One denied child denies an AND; an OR needs every child denied.
        Propagator p(m);
        p.set(ix("z"), Label::Denied);
        p.step(ix("z"), nullptr);
        CHECK(p.label(ix("o")) == Label::Undefined);
        p.set(ix("x"), Label::Denied);
        p.step(ix("x"), nullptr);
        CHECK(p.label(ix("a")) == Label::Denied);
        // denial of a flows down to y and then the OR has no satisfied child;
        // the denied OR reaches r first, through helps
        CHECK(p.label(ix("y")) == Label::Denied);
        CHECK(p.label(ix("o")) == Label::Denied);
        CHECK(p.label(ix("r")) == Label::PartialDen);
        CHECK(all_edges_consistent(p, m));
    }
}

TEST_CASE("sample leaves no leaf undefined and keeps non-ignored edges consistent") {
    auto m = parse_model(kMixed);
    auto costs = sample_costs(m, 1);
    Propagator p(m);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(seed);
        Prior prior;
        if (seed % 3 == 1) prior.push_back({m.index_of("x"), Label::Denied});
        if (seed % 5 == 2) prior.push_back({m.index_of("s"), Label::Satisfied});
        auto sol = sample(p, m, prior, costs, rng);
        for (auto l : m.leaves()) CHECK(sol.labels[l] != Label::Undefined);
        CHECK(all_edges_consistent(p, m));
        CHECK(sol.ignored_count == sol.objectives.ignored);
        CHECK(sol.objectives.cost >= 0.0);
        CHECK(sol.objectives.goals <= 1);
        CHECK(sol.objectives.softgoals <= 1);
    }
}

TEST_CASE("sample on a contradiction-free makes tree satisfies everything") {
    auto m = parse_model(
        "node r hardgoal root\nnode a and\nnode b and\nnode c or\nnode x leaf\nnode y leaf\n"
        "node z leaf\nnode w leaf\nnode v leaf\nedge r a makes\nedge r b makes\nedge a x makes\n"
        "edge a y makes\nedge b c makes\nedge b z makes\nedge c w makes\nedge c v makes\n");
    auto costs = sample_costs(m, 2);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        auto sol = sample(m, {{m.index_of("r"), Label::Satisfied}}, costs, rng);
        for (auto l : sol.labels) CHECK(l == Label::Satisfied);
        CHECK(sol.objectives.ignored == 0);
        CHECK(sol.objectives.goals == 1);
    }
}

TEST_CASE("single hardgoal leaf is picked and counted") {
    auto m = parse_model("node g hardgoal root\n");
    Rng rng(0);
    auto sol = sample(m, {}, sample_costs(m, 0), rng);
    CHECK(sol.labels[0] == Label::Satisfied);
    CHECK(sol.objectives.goals == 1);
    CHECK(sol.objectives.ignored == 0);
}

TEST_CASE("sample is deterministic and prior-sensitive") {
    auto m = parse_model(kMixed);
    auto costs = sample_costs(m, 5);
    Rng r1(42), r2(42);
    auto a = sample(m, {}, costs, r1);
    auto b = sample(m, {}, costs, r2);
    CHECK(a == b);
    std::map<int, int> free_goals, denied_goals;
    for (std::uint64_t s = 0; s < 200; ++s) {
        Rng x(s), y(s);
        free_goals[sample(m, {}, costs, x).objectives.goals]++;
        denied_goals[sample(m, {{m.index_of("x"), Label::Denied}}, costs, y).objectives.goals]++;
    }
    CHECK(free_goals != denied_goals);
}

TEST_CASE("unknown prior node is rejected") {
    auto m = parse_model(kMixed);
    Rng rng(0);
    CHECK_THROWS_AS(sample(m, {{999, Label::Satisfied}}, sample_costs(m, 0), rng), ModelError);
    CHECK_THROWS_AS(parse_decision(m, "nope:denied"), ModelError);
    CHECK(parse_decision(m, "x:denied").polarity == Label::Denied);
    CHECK(parse_decision(m, "x").polarity == Label::Satisfied);
}

TEST_CASE("enumerate_worlds counts") {
    auto one = parse_model("node g hardgoal root\nnode a leaf\nedge g a makes\n");
    CHECK(enumerate_worlds(one, sample_costs(one, 0)).size() == 2);
    auto three = parse_model("node a leaf\nnode b leaf\nnode c leaf\n");
    auto worlds = enumerate_worlds(three, sample_costs(three, 0));
    CHECK(worlds.size() == 8);
    std::set<std::vector<Label>> distinct;
    for (auto& w : worlds) distinct.insert(w.labels);
    CHECK(distinct.size() == 8);
    CHECK_THROWS(enumerate_worlds(three, sample_costs(three, 0), 2));
}

TEST_CASE("pareto dominance") {
    ObjectiveVector a{1, 0, 2, 1}, b{2, 0, 2, 1}, c{0, 0, 1, 1};
    CHECK(pareto_dominates(a, b));
    CHECK_FALSE(pareto_dominates(b, a));
    CHECK_FALSE(pareto_dominates(a, a));
    CHECK_FALSE(pareto_dominates(a, c));
    CHECK_FALSE(pareto_dominates(c, a));
}

TEST_CASE("objective mask parsing") {
    auto m = parse_objectives("o1,o3");
    CHECK(m.on == std::array<bool, 4>{true, false, true, false});
    CHECK(format_objectives(m) == "o1,o3");
    CHECK(parse_objectives("cost,softgoals").on == std::array<bool, 4>{true, false, false, true});
    CHECK_THROWS(parse_objectives("o9"));
    CHECK_THROWS(parse_objectives(""));
}
