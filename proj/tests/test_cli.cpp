#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "shortkit/cli.hpp"
#include "shortkit/report.hpp"

using namespace shortkit;
namespace fs = std::filesystem;

namespace {

const std::string kFixture = std::string(SHORTKIT_FIXTURES) + "/it_modernization.model";

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "short");
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("shortkit_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
    return p.string();
}

const char* kSmall =
    "node g hardgoal root\nnode s softgoal root\nnode a leaf\nnode b leaf\nnode c leaf\nnode d leaf\n"
    "edge g a makes\nedge g b helps\nedge s c makes\nedge s b hurts\nedge s d helps\n";

std::string small_model() { return write_file(scratch("small") / "small.model", kSmall); }

}  // namespace

TEST_CASE("usage errors exit 2") {
    CHECK(cli({}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"validate", kFixture, "--bogus"}).code == 2);
    CHECK(cli({"validate", "/nonexistent/model"}).code == 2);
    CHECK(cli({"sample", kFixture, "--format", "pdf"}).code == 2);
    CHECK(cli({"sample", kFixture, "--prior", "no_such_leaf"}).code == 2);
    CHECK(cli({"sample", kFixture, "--objectives", "o9"}).code == 2);
    auto r = cli({"rank", small_model(), "--format", "svg"});
    CHECK(r.code == 2);  // rankings are not curve-shaped
}

TEST_CASE("help exits 0") {
    auto r = cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("keys") != std::string::npos);
}

TEST_CASE("validate reports violations and exits 1") {
    auto ok = cli({"validate", kFixture});
    CHECK(ok.code == 0);
    auto j = Json::parse(ok.out);
    CHECK(j["valid"] == true);
    CHECK(j["nodes"] == 53);
    CHECK(j["edges"] == 57);

    auto dir = scratch("validate");
    auto cyc = write_file(dir / "cycle.model",
                          "node g hardgoal root\nnode x and\nnode y and\nnode a leaf\n"
                          "edge g x makes\nedge x y makes\nedge y x makes\nedge y a makes\n");
    auto bad = cli({"validate", cyc});
    CHECK(bad.code == 1);
    CHECK(Json::parse(bad.out)["valid"] == false);
    CHECK(!bad.err.empty());

    auto garbage = write_file(dir / "garbage.model", "node\n");
    CHECK(cli({"validate", garbage}).code == 1);
    // other subcommands refuse invalid models the same way
    CHECK(cli({"sample", cyc}).code == 1);
}

TEST_CASE("sample honours priors and seeds") {
    auto m = small_model();
    auto r = cli({"sample", m, "--prior", "a:denied", "--prior", "c", "--seed", "3"});
    REQUIRE(r.code == 0);
    auto j = Json::parse(r.out);
    auto used = j["samples"][0]["prior_used"];
    CHECK(used.size() == 2);
    CHECK(j["samples"][0]["labels"]["a"] == "denied");
    CHECK(j["samples"][0]["labels"]["c"] == "satisfied");
    CHECK(j["costs"]["seed"].is_number());
    CHECK(cli({"sample", m, "--seed", "3", "--count", "5"}).out ==
          cli({"sample", m, "--seed", "3", "--count", "5"}).out);
    CHECK(cli({"sample", m, "--seed", "3", "--count", "5"}).out !=
          cli({"sample", m, "--seed", "4", "--count", "5"}).out);
}

TEST_CASE("SHORT_SEED supplies the default seed") {
    auto m = small_model();
    ::setenv("SHORT_SEED", "11", 1);
    auto env = cli({"sample", m, "--count", "3"});
    ::unsetenv("SHORT_SEED");
    auto flag = cli({"sample", m, "--count", "3", "--seed", "11"});
    auto other = cli({"sample", m, "--count", "3", "--seed", "12"});
    CHECK(env.code == 0);
    CHECK(env.out == flag.out);
    CHECK(env.out != other.out);
    ::setenv("SHORT_SEED", "not-a-number", 1);
    CHECK(cli({"sample", m}).code == 2);
    ::unsetenv("SHORT_SEED");
}

TEST_CASE("every subcommand is byte-identical for a fixed seed") {
    auto m = small_model();
    auto dir = scratch("cfg");
    auto cfg = write_file(dir / "cfg.json", R"({"runs": 3, "compare": {"runs": 2, "replay_samples": 5}})");
    auto spec = write_file(dir / "spec.json", R"({"nodes": 30, "keys": 3})");
    const std::vector<std::vector<std::string>> cmds = {
        {"validate", m},
        {"sample", m, "--count", "4"},
        {"optimize", m},
        {"rank", m, "--config", cfg},
        {"test", m, "--config", cfg},
        {"keys", m, "--config", cfg},
        {"compare", m, "--config", cfg},
        {"gen", spec},
    };
    for (auto c : cmds) {
        c.push_back("--seed");
        c.push_back("5");
        auto a = cli(c), b = cli(c);
        INFO(c[0]);
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
        CHECK(Json::accept(a.out));
    }
}

TEST_CASE("test emits csv and svg projections") {
    auto m = small_model();
    auto csv = cli({"test", m, "--format", "csv", "--seed", "2"});
    REQUIRE(csv.code == 0);
    std::istringstream in(csv.out);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 1 + 5 * 4);  // 4 leaves -> x = 0..4, four objectives

    auto two = cli({"test", m, "--format", "csv", "--objectives", "o1,o3", "--seed", "2"});
    std::istringstream in2(two.out);
    rows = 0;
    while (std::getline(in2, line)) ++rows;
    CHECK(rows == 1 + 5 * 2);

    auto svg = cli({"test", m, "--format", "svg", "--seed", "2"});
    CHECK(svg.code == 0);
    CHECK(svg.out.rfind("<?xml", 0) == 0);
}

TEST_CASE("out directory collects json and projections") {
    auto m = small_model();
    auto dir = scratch("out");
    auto r = cli({"keys", m, "--out", dir.string(), "--seed", "1"});
    REQUIRE(r.code == 0);
    for (auto f : {"keys.json", "ordering.json", "curve.json", "curve.csv", "curve.svg"})
        CHECK(fs::exists(dir / f));
    std::ifstream in(dir / "keys.json");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == r.out);
}

TEST_CASE("gen emits a loadable model with its planted keys") {
    auto dir = scratch("gen");
    auto r = cli({"gen", R"({"nodes": 60, "keys": 3, "seed": 4})"});
    REQUIRE(r.code == 0);
    auto model = parse_model_any(r.out);
    CHECK(model.node_count() == 60);
    CHECK(Json::parse(r.out)["planted_keys"].size() == 3);
    auto file = write_file(dir / "gen.json", r.out);
    CHECK(cli({"validate", file}).code == 0);
    CHECK(cli({"gen", R"({"nodes": 10, "keys": 5})"}).code == 1);  // infeasible spec
}

TEST_CASE("costs file overrides the sampled costs") {
    auto m = small_model();
    auto dir = scratch("costs");
    auto fixed = write_file(dir / "fixed.json", R"({"a": 1.5, "b": 2, "c": 3, "d": 4})");
    auto r = cli({"sample", m, "--costs", fixed});
    REQUIRE(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j["costs"]["costs"]["a"] == 1.5);
    CHECK(j["costs"]["costs"]["d"] == 4.0);
    auto partial = write_file(dir / "partial.json", R"({"a": 1})");
    CHECK(cli({"sample", m, "--costs", partial}).code == 2);
    auto tri = write_file(dir / "tri.json", R"({"distribution": [2, 2, 2]})");
    auto t = Json::parse(cli({"sample", m, "--costs", tri}).out);
    CHECK(t["costs"]["costs"]["b"] == 2.0);
}

TEST_CASE("keys on the fixture finds the three key decisions") {
    auto r = cli({"keys", kFixture, "--seed", "7"});
    REQUIRE(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j["kappa"] == 3);
    std::set<std::string> top;
    for (const auto& k : j["keys"]) top.insert(k["node"].get<std::string>() + ":" + k["polarity"].get<std::string>());
    CHECK(top == std::set<std::string>{"j2ee_specification:satisfied", "pnp_framework:denied",
                                       "new_database:denied"});
}
