#include <doctest.h>

#include <set>

#include "shortkit/ranking.hpp"

using namespace shortkit;

namespace {

// A cheap leaf that, picked first, satisfies the only hardgoal and leaves the
// rest of the model partial; picking the others first blocks it.
const char* kOneKey =
    "node g hardgoal root\nnode m and\nnode a leaf\nnode b leaf\nnode c leaf\nnode d leaf\n"
    "edge g a makes\nedge g m helps\nedge m b makes\nedge m c makes\nedge m d makes\n";

TestCurve flat_curve(const std::vector<std::vector<double>>& per_x) {
    TestCurve c;
    c.samples = static_cast<int>(per_x.front().size());
    for (std::size_t x = 0; x < per_x.size(); ++x) {
        CurvePoint p;
        p.x = static_cast<int>(x);
        for (std::size_t j = 0; j < kObjectives; ++j) {
            p.raw[j] = per_x[x];
            auto mi = median_iqr(p.raw[j]);
            p.median[j] = p.median_smoothed[j] = mi.median;
            p.iqr[j] = p.iqr_smoothed[j] = mi.iqr;
        }
        c.points.push_back(std::move(p));
        if (x > 0) c.decisions.push_back({static_cast<NodeIndex>(x), Label::Satisfied});
    }
    return c;
}

}  // namespace

TEST_CASE("bore score examples") {
    auto a = bore_score(20, 0);
    CHECK(a.support == doctest::Approx(2.0));
    CHECK(a.probability == 1.0);
    auto b = bore_score(0, 20);
    CHECK(b.support == 0);
    CHECK(b.probability == 0);
    auto c = bore_score(2, 18);
    CHECK(c.support == doctest::Approx(0.2));
    CHECK(c.probability == doctest::Approx(0.2 / 16.4).epsilon(1e-12));
    auto z = bore_score(0, 0);
    CHECK(z.support == 0);
    CHECK(z.probability == 0);
    CHECK_THROWS_AS(bore_score(-1, 3), std::invalid_argument);
}

TEST_CASE("bore probability is monotone in both counts") {
    for (int n2 = 1; n2 < 30; n2 += 3)
        for (int n1 = 1; n1 < 30; ++n1) {
            CHECK(bore_score(n1 + 1, n2).probability > bore_score(n1, n2).probability);
            CHECK(bore_score(n1, n2 + 1).probability < bore_score(n1, n2).probability);
        }
}

TEST_CASE("solution decisions are priors plus fully labelled leaves") {
    auto m = parse_model(kOneKey);
    Solution s;
    s.labels.assign(m.node_count(), Label::Undefined);
    s.labels[m.index_of("a")] = Label::Satisfied;
    s.labels[m.index_of("b")] = Label::PartialSat;
    s.labels[m.index_of("c")] = Label::Denied;
    s.labels[m.index_of("g")] = Label::Satisfied;  // not a leaf
    s.prior_used = {{m.index_of("a"), Label::Satisfied}};
    auto d = solution_decisions(m, s);
    std::set<std::string> got;
    for (auto& x : d) got.insert(format_decision(m, x));
    CHECK(got == std::set<std::string>{"a:satisfied", "c:denied"});
}

TEST_CASE("a leaf that alone satisfies the only hardgoal ranks first") {
    auto m = parse_model(kOneKey);
    auto costs = sample_costs(m, 1);
    // brute force: only worlds with a satisfied reach the goal
    for (const auto& w : enumerate_worlds(m, costs))
        if (w.objectives.goals == 1) CHECK(w.labels[m.index_of("a")] == Label::Satisfied);

    RankConfig cfg;
    cfg.runs = 5;
    auto r = rank(m, costs, cfg, 17);
    REQUIRE(r.ordering.size() == m.leaves().size());
    CHECK(format_decision(m, r.ordering[0].decision) == "a:satisfied");
    CHECK(r.pooled == 5 * 10 * m.leaves().size());
}

TEST_CASE("rank with equal objectives falls back to node id order") {
    auto m = parse_model(
        "node g softgoal root\nnode z leaf\nnode y leaf\nnode x leaf\n"
        "edge g z makes\nedge g y makes\nedge g x makes\ncost * 0 0 0\n");
    auto costs = sample_costs(m, 1);
    RankConfig cfg;
    cfg.runs = 2;
    cfg.optimizer.init_free = 1.0;
    auto r = rank(m, costs, cfg, 3);
    REQUIRE(r.ordering.size() == 3);
    CHECK(r.ordering[0].value == r.ordering[2].value);
    CHECK(format_decision(m, r.ordering[0].decision) == "x:satisfied");
    CHECK(format_decision(m, r.ordering[1].decision) == "y:satisfied");
    CHECK(format_decision(m, r.ordering[2].decision) == "z:satisfied");
}

TEST_CASE("rank is reproducible and leaves pinned leaves out") {
    auto m = parse_model(kOneKey);
    auto costs = sample_costs(m, 2);
    RankConfig cfg;
    cfg.runs = 3;
    auto a = rank(m, costs, cfg, 8), b = rank(m, costs, cfg, 8);
    REQUIRE(a.ordering.size() == b.ordering.size());
    for (std::size_t i = 0; i < a.ordering.size(); ++i) {
        CHECK(a.ordering[i].decision == b.ordering[i].decision);
        CHECK(a.ordering[i].value == b.ordering[i].value);
    }
    cfg.optimizer.pinned = {{m.index_of("b"), Label::Denied}};
    auto p = rank(m, costs, cfg, 8);
    CHECK(p.ordering.size() == m.leaves().size() - 1);
    for (auto& d : p.ordering) CHECK(d.decision.node != m.index_of("b"));
}

TEST_CASE("per-run n2 reading scores in run units") {
    auto m = parse_model(kOneKey);
    auto costs = sample_costs(m, 2);
    RankConfig cfg;
    cfg.runs = 4;
    cfg.per_run_n2 = true;
    auto r = rank(m, costs, cfg, 8);
    CHECK(format_decision(m, r.ordering[0].decision) == "a:satisfied");
    for (auto& d : r.ordering)
        for (std::size_t j = 0; j < kObjectives; ++j) {
            CHECK(d.support[j] <= 0.1 * cfg.runs + 1e-9);
            CHECK(d.probability[j] <= 1.0);
        }
}

TEST_CASE("test curve: fixing every decision removes cost variance") {
    auto m = parse_model(kOneKey);
    auto costs = sample_costs(m, 2);
    std::vector<Decision> ord;
    for (auto leaf : m.leaves()) ord.push_back({leaf, Label::Denied});
    TestConfig tc;
    auto c = test_curve(m, costs, ord, tc, 5);
    REQUIRE(c.points.size() == ord.size() + 1);
    CHECK(c.points.front().x == 0);
    CHECK(c.points.back().iqr[0] == 0);
    for (auto& p : c.points) CHECK(p.raw[0].size() == 20);
    auto again = test_curve(m, costs, ord, tc, 5);
    for (std::size_t x = 0; x < c.points.size(); ++x) CHECK(c.points[x].raw == again.points[x].raw);
}

TEST_CASE("test curve honours pinned decisions") {
    // a is the only way to the hardgoal; b sits under an unrelated softgoal
    auto m = parse_model(
        "node g hardgoal root\nnode h softgoal root\nnode a leaf\nnode b leaf\n"
        "edge g a makes\nedge h b makes\n");
    auto costs = sample_costs(m, 2);
    Prior pins{{m.index_of("a"), Label::Satisfied}};
    std::vector<Decision> ord{{m.index_of("b"), Label::Denied}};
    auto c = test_curve(m, costs, ord, TestConfig{}, 1, pins);
    for (auto& p : c.points)
        for (double g : p.raw[2]) CHECK(g == 1);
    pins[0].polarity = Label::Denied;
    auto d = test_curve(m, costs, ord, TestConfig{}, 1, pins);
    for (auto& p : d.points)
        for (double g : p.raw[2]) CHECK(g == 0);
}

TEST_CASE("smoothing identical batches gives one flat segment") {
    std::vector<std::vector<double>> xs(6, {1, 2, 3, 4, 5, 6, 7, 8});
    auto s = smooth_curve(flat_curve(xs));
    CHECK(s.smoothed);
    for (std::size_t j = 0; j < kObjectives; ++j) CHECK(s.segments[j] == 1);
    for (auto& p : s.points) CHECK(p.median_smoothed[0] == doctest::Approx(4.5));
}

TEST_CASE("smoothing a step function gives two segments breaking at the step") {
    std::vector<std::vector<double>> xs;
    for (int x = 0; x < 10; ++x) {
        std::vector<double> b(20);
        for (int i = 0; i < 20; ++i) b[i] = (x < 5 ? 0.0 : 100.0) + 0.01 * i;
        xs.push_back(b);
    }
    auto s = smooth_curve(flat_curve(xs));
    for (std::size_t j = 0; j < kObjectives; ++j) CHECK(s.segments[j] == 2);
    for (int x = 0; x < 10; ++x) CHECK((s.points[x].median_smoothed[0] < 50) == (x < 5));
}

TEST_CASE("smoothing is idempotent") {
    Rng r(12);
    std::vector<std::vector<double>> xs;
    for (int x = 0; x < 8; ++x) {
        std::vector<double> b(20);
        for (auto& v : b) v = (x < 3 ? 10.0 : x < 6 ? 4.0 : 1.0) + r.uniform();
        xs.push_back(b);
    }
    auto once = smooth_curve(flat_curve(xs));
    auto twice = smooth_curve(once);
    for (std::size_t x = 0; x < once.points.size(); ++x) {
        CHECK(once.points[x].median_smoothed == twice.points[x].median_smoothed);
        CHECK(once.points[x].iqr_smoothed == twice.points[x].iqr_smoothed);
    }
    CHECK(once.segments == twice.segments);
}

TEST_CASE("detect keys: collapse point, constant baseline and no collapse") {
    std::vector<std::vector<double>> xs;
    for (int x = 0; x < 6; ++x) {
        std::vector<double> b(20);
        for (int i = 0; i < 20; ++i) b[i] = x < 2 ? i : 3.0;
        xs.push_back(b);
    }
    auto k = detect_keys(flat_curve(xs));
    CHECK(k.kappa == 2);
    CHECK(k.collapsed);
    CHECK(k.keys.size() == 2);
    CHECK(k.decisions == 5);
    CHECK(k.ratio[0] == 0);

    std::vector<std::vector<double>> flat(4, std::vector<double>(20, 1.0));
    CHECK(detect_keys(flat_curve(flat)).kappa == 1);

    std::vector<std::vector<double>> noisy;
    for (int x = 0; x < 4; ++x) {
        std::vector<double> b(20);
        for (int i = 0; i < 20; ++i) b[i] = i;
        noisy.push_back(b);
    }
    auto n = detect_keys(flat_curve(noisy));
    CHECK_FALSE(n.collapsed);
    CHECK(n.kappa == 3);
}

TEST_CASE("fixture: keys come first and the curve collapses at three") {
    auto m = load_model_file(SHORTKIT_FIXTURES "/it_modernization.model");
    auto costs = sample_costs(m, derive_seed(0, {1}));
    auto r = rank(m, costs, RankConfig{}, derive_seed(0, {2}));
    std::set<std::string> top;
    std::vector<Decision> ord;
    for (auto& d : r.ordering) ord.push_back(d.decision);
    for (int i = 0; i < 3; ++i) top.insert(format_decision(m, ord[i]));
    CHECK(top == std::set<std::string>{"j2ee_specification:satisfied", "pnp_framework:denied",
                                       "new_database:denied"});
    auto c = smooth_curve(test_curve(m, costs, ord, TestConfig{}, derive_seed(0, {3})));
    auto k = detect_keys(c);
    CHECK(k.kappa == 3);
    for (std::size_t j = 0; j < kObjectives; ++j) CHECK(c.segments[j] <= 4);
}
