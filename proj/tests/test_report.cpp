#include <doctest.h>

#include <sstream>

#include "shortkit/report.hpp"

using namespace shortkit;

namespace {

// Minimal XML well-formedness check: balanced tags, quoted attributes.
bool well_formed(const std::string& s) {
    std::vector<std::string> stack;
    std::size_t i = 0;
    bool root_seen = false;
    while ((i = s.find('<', i)) != std::string::npos) {
        auto j = s.find('>', i);
        if (j == std::string::npos) return false;
        std::string tag = s.substr(i + 1, j - i - 1);
        i = j + 1;
        if (tag.empty()) return false;
        if (tag[0] == '?' || tag[0] == '!') continue;
        if (tag[0] == '/') {
            if (stack.empty() || stack.back() != tag.substr(1)) return false;
            stack.pop_back();
            continue;
        }
        const bool self = tag.back() == '/';
        if (self) tag.pop_back();
        const auto name = tag.substr(0, tag.find_first_of(" \n\t"));
        if (std::count(tag.begin(), tag.end(), '"') % 2) return false;
        if (stack.empty()) {
            if (root_seen) return false;
            root_seen = true;
        }
        if (!self) stack.push_back(name);
    }
    return root_seen && stack.empty();
}

TestCurve small_curve(int xs) {
    auto m = parse_model(
        "node g hardgoal root\nnode s softgoal root\nnode a leaf\nnode b leaf\nnode c leaf\n"
        "edge g a makes\nedge g b helps\nedge s c makes\nedge s b hurts\n");
    auto costs = sample_costs(m, 1);
    std::vector<Decision> ord;
    for (int i = 0; i < xs; ++i) ord.push_back({m.leaves()[i], Label::Satisfied});
    return smooth_curve(test_curve(m, costs, ord, TestConfig{}, 3));
}

}  // namespace

TEST_CASE("curve csv has one row per x per enabled objective") {
    auto c = small_curve(3);
    auto csv = curve_csv(c);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,objective,median,iqr,median_smoothed,iqr_smoothed");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 4 * 4);
    c.mask.on = {true, false, true, false};
    std::istringstream in2(curve_csv(c));
    rows = -1;
    while (std::getline(in2, line)) ++rows;
    CHECK(rows == 4 * 2);
    CHECK(curve_csv(c).find("o2-ignored") == std::string::npos);
}

TEST_CASE("svg is well formed with one panel per objective") {
    auto c = small_curve(3);
    auto svg = render_curve_svg(c);
    CHECK(well_formed(svg));
    CHECK(svg.rfind("<?xml", 0) == 0);
    std::size_t panels = 0;
    for (std::size_t p = 0; (p = svg.find("class=\"panel\"", p)) != std::string::npos; ++p) ++panels;
    CHECK(panels == 4);
    CHECK(svg.find("o3-goals") != std::string::npos);
    CHECK(svg.find("decisions fixed") != std::string::npos);
}

TEST_CASE("svg of a single-x curve is still valid") {
    auto c = small_curve(0);
    REQUIRE(c.points.size() == 1);
    CHECK(well_formed(render_curve_svg(c)));
}

TEST_CASE("svg refuses an empty objective set or empty curve") {
    auto c = small_curve(2);
    c.mask.on = {false, false, false, false};
    CHECK_THROWS_AS(render_curve_svg(c), std::invalid_argument);
    CHECK_THROWS_AS(render_curve_svg(TestCurve{}), std::invalid_argument);
}

TEST_CASE("json views carry the documented fields") {
    auto m = parse_model("node g hardgoal root\nnode a leaf\nnode b leaf\nedge g a makes\nedge g b hurts\n");
    auto costs = sample_costs(m, 1);
    Rng r(1);
    auto s = sample(m, {{m.index_of("a"), Label::Satisfied}}, costs, r);
    auto js = to_json(m, s);
    CHECK(js["objectives"]["o3-goals"] == s.objectives.goals);
    CHECK(js["prior_used"][0] == "a:satisfied");
    CHECK(js.contains("satisfied"));
    CHECK(js.contains("denied"));

    auto c = small_curve(2);
    auto jc = to_json(c.decisions.empty() ? m : m, c);
    CHECK(jc["points"].size() == c.points.size());
    CHECK(jc["points"][0]["x"] == 0);

    KeyReport k;
    k.kappa = 2;
    k.decisions = 10;
    k.ratio = {0.0, std::numeric_limits<double>::infinity(), 0.5, 0.0};
    auto jk = to_json(m, k);
    CHECK(jk["kappa"] == 2);
    CHECK(jk["fraction"] == doctest::Approx(0.2));
    CHECK(jk["ratio"]["o2-ignored"].is_null());
    CHECK(jk.dump().find("inf") == std::string::npos);
}

TEST_CASE("ranking json and markdown") {
    auto m = parse_model("node g hardgoal root\nnode a leaf\nnode b leaf\nedge g a makes\nedge g b hurts\n");
    RankResult r;
    DecisionScore d;
    d.decision = {m.index_of("b"), Label::Denied};
    d.value = 1.5;
    r.ordering.push_back(d);
    r.pooled = 40;
    auto j = to_json(m, r);
    CHECK(j["ordering"][0]["rank"] == 1);
    CHECK(j["ordering"][0]["node"] == "b");
    CHECK(j["ordering"][0]["polarity"] == "denied");
    CHECK(j["pooled"] == 40);
    auto md = ranking_markdown(m, r);
    CHECK(md.find("| 1 | b | denied |") != std::string::npos);
}
