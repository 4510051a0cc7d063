#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "shortkit/nsga2.hpp"

using namespace shortkit;

namespace {

// front index by repeated removal of the pairwise non-dominated set
std::vector<int> pairwise_fronts(const std::vector<ObjectiveVector>& v, const ObjectiveMask& m) {
    std::vector<int> front(v.size(), -1);
    std::size_t left = v.size();
    for (int f = 0; left > 0; ++f) {
        std::vector<std::size_t> now;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (front[i] != -1) continue;
            bool dominated = false;
            for (std::size_t k = 0; k < v.size() && !dominated; ++k)
                dominated = front[k] == -1 && pareto_dominates(v[k], v[i], m);
            if (!dominated) now.push_back(i);
        }
        for (auto i : now) front[i] = f;
        left -= now.size();
    }
    return front;
}

const char* kOneKey =
    "node g hardgoal root\nnode s softgoal root\nnode m and\nnode a leaf\nnode b leaf\n"
    "node c leaf\nnode d leaf\n"
    "edge g a makes\nedge g m helps\nedge m b makes\nedge m c makes\nedge m d makes\n"
    "edge s b helps\nedge s c hurts\n";

}  // namespace

TEST_CASE("non-dominated sort: identical vectors form one front") {
    std::vector<ObjectiveVector> v(7, ObjectiveVector{3, 1, 2, 2});
    auto f = fast_nondominated_sort(v);
    REQUIRE(f.size() == 1);
    CHECK(f[0].size() == 7);
}

TEST_CASE("non-dominated sort: a strict chain gives singleton fronts") {
    std::vector<ObjectiveVector> v{{5, 0, 1, 1}, {1, 0, 3, 3}, {3, 0, 2, 2}};
    auto f = fast_nondominated_sort(v);
    REQUIRE(f.size() == 3);
    CHECK(f[0] == std::vector<std::size_t>{1});
    CHECK(f[1] == std::vector<std::size_t>{2});
    CHECK(f[2] == std::vector<std::size_t>{0});
}

TEST_CASE("non-dominated sort matches a pairwise oracle") {
    Rng r(21);
    ObjectiveMask two;
    two.on = {true, false, true, false};
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<ObjectiveVector> v(50);
        for (auto& x : v)
            x = {static_cast<double>(r.below(12)), static_cast<int>(r.below(4)),
                 static_cast<int>(r.below(12)), static_cast<int>(r.below(4))};
        for (const auto& mask : {two, ObjectiveMask{}}) {
            auto fronts = fast_nondominated_sort(v, mask);
            auto oracle = pairwise_fronts(v, mask);
            std::size_t seen = 0;
            for (std::size_t f = 0; f < fronts.size(); ++f)
                for (auto i : fronts[f]) {
                    CHECK(oracle[i] == static_cast<int>(f));
                    ++seen;
                }
            CHECK(seen == v.size());
            for (auto i : fronts[0])
                for (auto k : fronts[0]) CHECK_FALSE(pareto_dominates(v[i], v[k], mask));
        }
    }
}

TEST_CASE("crowding distance: extremes are infinite, interior by normalised gaps") {
    ObjectiveMask one;
    one.on = {true, false, false, false};
    std::vector<ObjectiveVector> v{{0, 0, 0, 0}, {4, 0, 0, 0}, {1, 0, 0, 0}, {10, 0, 0, 0}};
    std::vector<std::size_t> front{0, 1, 2, 3};
    auto d = crowding_distance(v, front, one);
    CHECK(std::isinf(d[0]));
    CHECK(std::isinf(d[3]));
    CHECK(d[2] == doctest::Approx(0.4));  // (4 - 0) / 10
    CHECK(d[1] == doctest::Approx(0.9));  // (10 - 1) / 10
    auto two = crowding_distance(v, std::vector<std::size_t>{1, 2}, one);
    CHECK(std::isinf(two[0]));
    CHECK(std::isinf(two[1]));
}

TEST_CASE("decode maps trits to priors and pins win") {
    auto m = parse_model(kOneKey);
    auto leaves = m.leaves();
    Genome g(leaves.size(), Trit::Free);
    g[0] = Trit::Satisfy;
    g[1] = Trit::Deny;
    auto p = decode(m, g);
    REQUIRE(p.size() == 2);
    CHECK(p[0] == Decision{leaves[0], Label::Satisfied});
    CHECK(p[1] == Decision{leaves[1], Label::Denied});
    auto q = decode(m, g, {{leaves[0], Label::Denied}});
    CHECK(std::find(q.begin(), q.end(), Decision{leaves[0], Label::Denied}) != q.end());
    CHECK(std::find(q.begin(), q.end(), Decision{leaves[0], Label::Satisfied}) == q.end());
    CHECK_THROWS_AS(decode(m, Genome(2, Trit::Free)), std::invalid_argument);
}

TEST_CASE("nsga2 rejects populations below four") {
    auto m = parse_model("node g hardgoal root\nnode a leaf\nedge g a makes\n");
    Nsga2Config cfg;
    cfg.population = 3;
    CHECK_THROWS_AS(nsga2(m, sample_costs(m, 1), cfg, 1), std::invalid_argument);
}

TEST_CASE("nsga2 on one leaf finds the goal within two generations") {
    auto m = parse_model("node g hardgoal root\nnode a leaf\nedge g a makes\n");
    Nsga2Config cfg;
    cfg.population = 8;
    cfg.generations = 2;
    cfg.enabled.on = {false, false, true, false};
    auto r = nsga2(m, sample_costs(m, 1), cfg, 4);
    CHECK(r.generations == 2);
    REQUIRE_FALSE(r.front.empty());
    for (auto i : r.front) {
        CHECK(r.population[i].solution.objectives.goals == 1);
        CHECK(r.population[i].genome[0] != Trit::Deny);
    }
}

TEST_CASE("nsga2 front is mutually non-dominating and no world beats it") {
    auto m = parse_model(kOneKey);
    auto costs = sample_costs(m, 6);
    Nsga2Config cfg;
    cfg.population = 40;
    cfg.generations = 40;
    auto r = nsga2(m, costs, cfg, 6);
    CHECK(r.population.size() == 40);
    CHECK(r.evaluations == 40u * (1 + 40));
    auto worlds = enumerate_worlds(m, costs);
    double min_cost = 1e18;
    for (auto i : r.front) min_cost = std::min(min_cost, r.population[i].solution.objectives.cost);
    for (auto i : r.front) {
        const auto& o = r.population[i].solution.objectives;
        for (auto k : r.front) CHECK_FALSE(pareto_dominates(r.population[k].solution.objectives, o));
        for (const auto& w : worlds) CHECK_FALSE(pareto_dominates(w.objectives, o));
        CHECK(min_cost <= o.cost);
    }
}

TEST_CASE("nsga2 is deterministic and honours the evaluation budget") {
    auto m = load_model_file(SHORTKIT_FIXTURES "/it_modernization.model");
    auto costs = sample_costs(m, 2);
    Nsga2Config cfg;
    cfg.population = 20;
    cfg.generations = 1000;
    cfg.max_evaluations = 250;
    auto a = nsga2(m, costs, cfg, 13), b = nsga2(m, costs, cfg, 13);
    CHECK(a.evaluations <= 250);
    CHECK(a.evaluations == 20u * (1 + a.generations));
    CHECK(a.generations == 11);
    REQUIRE(a.population.size() == b.population.size());
    for (std::size_t i = 0; i < a.population.size(); ++i) {
        CHECK(a.population[i].genome == b.population[i].genome);
        CHECK(a.population[i].solution == b.population[i].solution);
    }
    CHECK(a.front == b.front);
}

TEST_CASE("nsga2 keeps pinned decisions in every member") {
    auto m = parse_model(kOneKey);
    Nsga2Config cfg;
    cfg.population = 12;
    cfg.generations = 5;
    cfg.pinned = {{m.index_of("a"), Label::Denied}};
    auto r = nsga2(m, sample_costs(m, 1), cfg, 2);
    for (const auto& p : r.population) CHECK(p.solution.labels[m.index_of("a")] == Label::Denied);
}

TEST_CASE("coverage percentages") {
    auto m = parse_model(kOneKey);
    ObjectiveVector o{0, 0, 1, 0};
    auto c = coverage(m, o);
    CHECK(c.goals == 100.0);
    CHECK(c.softgoals == 0.0);
    auto none = parse_model("node a leaf\n");
    CHECK(coverage(none, o).goals == 100.0);  // nothing to satisfy
}

TEST_CASE("compare on a trivially satisfiable model") {
    auto m = parse_model(
        "node g hardgoal root\nnode h hardgoal\nnode s softgoal root\nnode x and\n"
        "node a leaf\nnode b leaf\nnode c leaf\n"
        "edge g h makes\nedge g x makes\nedge x a makes\nedge x b makes\nedge h c makes\n"
        "edge s c makes\n");
    CompareConfig cfg;
    cfg.runs = 3;
    cfg.pipeline.rank.runs = 3;
    cfg.curve_points_timed = 2;
    auto rep = compare(m, sample_costs(m, 1), cfg, 5);
    CHECK(rep.short_method.f2.median == 100.0);
    CHECK(rep.nsga2.f2.median == 100.0);
    CHECK(rep.short_method.f1.median == 100.0);
    CHECK(rep.nsga2_budget == rep.short_method.evaluations / cfg.runs);
    CHECK(rep.curve_points == m.leaves().size() + 1);
    CHECK(rep.short_curve_seconds > 0);
    CHECK(rep.nsga2_curve_seconds > 0);
    auto md = comparison_markdown(rep);
    CHECK(md.find("| f2") != std::string::npos);
    auto again = compare(m, sample_costs(m, 1), cfg, 5);
    CHECK(again.short_method.f1_runs == rep.short_method.f1_runs);
    CHECK(again.nsga2.f2_runs == rep.nsga2.f2_runs);
}
