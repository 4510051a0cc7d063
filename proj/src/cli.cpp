#include "shortkit/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "shortkit/config.hpp"
#include "shortkit/report.hpp"
#include "shortkit/service.hpp"

namespace shortkit {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string input;  // model path, or generator spec
    std::string seed;
    std::string costs, config, objectives, out_dir;
    std::string format = "json";
    bool roots_only = false;
    std::vector<std::string> priors;
    int count = 1;
    bool timings = false;
    int port = 8080;
    std::string host = "127.0.0.1";
    std::string static_dir;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in || fs::is_directory(path)) throw UsageError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t parse_seed(const std::string& text, const char* what) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
        if (text.empty() || text[0] == '-') throw std::invalid_argument(text);
        v = std::stoull(text, &used, 0);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty())
        throw UsageError(std::string(what) + " must be an unsigned integer, got '" + text + "'");
    return v;
}

std::uint64_t resolve_seed(const Options& o) {
    if (!o.seed.empty()) return parse_seed(o.seed, "--seed");
    if (const char* env = std::getenv("SHORT_SEED")) return parse_seed(env, "SHORT_SEED");
    return 1;
}

// Model plus everything derived from the common flags.
struct Context {
    GoalModel model;
    std::uint64_t seed = 1;
    CostAssignment costs;
    RunConfig cfg;
    Prior prior;
};

GoalModel load_checked(const std::string& path, std::ostream& err) {
    const auto text = read_file(path);
    GoalModel m = parse_model_any(text, false);  // ParseError -> validation failure
    auto bad = validate(m);
    if (!bad.empty()) {
        for (const auto& v : bad) err << path << ": " << v.subject << ": " << v.rule << '\n';
        throw ValidationFailure(path + " is not a valid goal model");
    }
    return m;
}

Context make_context(const Options& o, std::ostream& err) {
    Context c;
    c.seed = resolve_seed(o);
    c.model = load_checked(o.input, err);
    if (!o.config.empty()) c.cfg = parse_run_config_text(read_file(o.config));
    auto& p = c.cfg.pipeline;
    if (!o.objectives.empty()) {
        p.objectives = parse_objectives(o.objectives);
        if (!p.objectives.any()) throw UsageError("--objectives enables nothing");
    }
    if (o.roots_only) {
        p.rank.optimizer.sample.roots_only_goals = true;
        p.test.sample.roots_only_goals = true;
        c.cfg.compare.nsga2.sample.roots_only_goals = true;
    }
    c.cfg.compare.pipeline = p;
    c.costs = o.costs.empty() ? sample_costs(c.model, cost_seed(c.seed))
                              : parse_costs(c.model, read_file(o.costs), cost_seed(c.seed));
    for (const auto& s : o.priors) {
        auto d = parse_decision(c.model, s);
        if (c.model.kind(d.node) != NodeKind::Leaf)
            throw UsageError("--prior " + s + ": only leaves can be decided");
        c.prior.push_back(d);
    }
    return c;
}

// Artifacts for --out; the first one is also what stdout shows for its format.
struct Artifact {
    std::string file, format, content;
};

void emit(const Options& o, const std::vector<Artifact>& arts, std::ostream& out) {
    const Artifact* shown = nullptr;
    for (const auto& a : arts)
        if (a.format == o.format) {
            shown = &a;
            break;
        }
    if (!shown) throw UsageError("--format " + o.format + " is not available for this command");
    if (!o.out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(o.out_dir, ec);
        if (ec) throw UsageError("cannot create " + o.out_dir + ": " + ec.message());
        for (const auto& a : arts) {
            std::ofstream f(fs::path(o.out_dir) / a.file, std::ios::binary);
            if (!(f << a.content)) throw std::runtime_error("cannot write " + a.file);
        }
    }
    out << shown->content;
}

Json validation_report(const GoalModel& m, const std::vector<Violation>& bad) {
    Json j;
    j["valid"] = bad.empty();
    j["nodes"] = m.node_count();
    j["edges"] = m.edge_count();
    j["leaves"] = m.leaves().size();
    Json v = Json::array();
    for (const auto& x : bad) v.push_back({{"subject", x.subject}, {"rule", x.rule}});
    j["violations"] = std::move(v);
    return j;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
    const auto text = read_file(o.input);
    GoalModel m;
    try {
        m = parse_model_any(text, false);
    } catch (const ParseError& e) {
        Json j;
        j["valid"] = false;
        j["violations"] = Json::array({{{"subject", "input"}, {"rule", e.what()}}});
        emit(o, {{"validate.json", "json", dump(j)}}, out);
        err << o.input << ": " << e.what() << '\n';
        return 1;
    }
    auto bad = validate(m);
    for (const auto& v : bad) err << o.input << ": " << v.subject << ": " << v.rule << '\n';
    emit(o, {{"validate.json", "json", dump(validation_report(m, bad))}}, out);
    return bad.empty() ? 0 : 1;
}

int cmd_sample(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.count < 1) throw UsageError("--count must be at least 1");
    auto c = make_context(o, err);
    const auto& opt = c.cfg.pipeline.test.sample;
    Json j;
    j["seed"] = c.seed;
    j["costs"] = to_json(c.model, c.costs);
    Json samples = Json::array();
    for (int i = 0; i < o.count; ++i) {
        Rng rng(derive_seed(c.seed, {4, static_cast<std::uint64_t>(i)}));
        samples.push_back(to_json(c.model, sample(c.model, c.prior, c.costs, rng, opt)));
    }
    j["samples"] = std::move(samples);
    emit(o, {{"sample.json", "json", dump(j)}}, out);
    return 0;
}

int cmd_optimize(const Options& o, std::ostream& out, std::ostream& err) {
    auto c = make_context(o, err);
    auto oc = c.cfg.pipeline.rank.optimizer;
    oc.enabled = c.cfg.pipeline.objectives;
    oc.pinned = c.prior;
    auto r = optimize(c.model, c.costs, oc, derive_seed(c.seed, {2}));
    emit(o, {{"optimize.json", "json", dump(to_json(c.model, r, oc))}}, out);
    return 0;
}

int cmd_rank(const Options& o, std::ostream& out, std::ostream& err) {
    auto c = make_context(o, err);
    auto rc = c.cfg.pipeline.rank;
    rc.optimizer.enabled = c.cfg.pipeline.objectives;
    rc.optimizer.pinned = c.prior;
    auto r = rank(c.model, c.costs, rc, derive_seed(c.seed, {2}));  // same stream as the pipeline
    emit(o,
         {{"ordering.json", "json", dump(to_json(c.model, r))},
          {"ordering.csv", "csv", ranking_csv(c.model, r)},
          {"ordering.md", "md", ranking_markdown(c.model, r)}},
         out);
    return 0;
}

int cmd_pipeline(const Options& o, bool keys_view, std::ostream& out, std::ostream& err) {
    auto c = make_context(o, err);
    auto p = run_pipeline(c.model, c.costs, c.cfg.pipeline, c.seed, c.prior);
    std::vector<Artifact> arts;
    const Artifact curve{"curve.json", "json", dump(to_json(c.model, p.curve))};
    if (keys_view) arts.push_back({"keys.json", "json", dump(to_json(c.model, p.keys))});
    arts.push_back(curve);
    arts.push_back({"curve.csv", "csv", curve_csv(p.curve)});
    arts.push_back({"curve.svg", "svg", render_curve_svg(p.curve)});
    arts.push_back({"ordering.json", "ordering", dump(to_json(c.model, p.ranking))});
    if (!keys_view) arts.push_back({"keys.json", "keys", dump(to_json(c.model, p.keys))});
    emit(o, arts, out);
    return 0;
}

int cmd_compare(const Options& o, std::ostream& out, std::ostream& err) {
    auto c = make_context(o, err);
    if (!c.prior.empty()) throw UsageError("compare does not take --prior");
    auto r = compare(c.model, c.costs, c.cfg.compare, c.seed);
    emit(o,
         {{"compare.json", "json", dump(to_json(r, o.timings))},
          {"compare.md", "md", comparison_markdown(r)}},
         out);
    return 0;
}

int cmd_gen(const Options& o, std::ostream& out) {
    const auto first = o.input.find_first_not_of(" \t\r\n");
    const bool inline_json = first != std::string::npos && o.input[first] == '{';
    const auto text = inline_json ? o.input : read_file(o.input);
    GenSpec spec;
    try {
        spec = parse_gen_spec(text);
    } catch (const std::invalid_argument& e) {
        throw ValidationFailure(e.what());
    }
    if (!o.seed.empty() || std::getenv("SHORT_SEED")) spec.seed = resolve_seed(o);
    auto g = generate_model(spec);
    emit(o,
         {{"model.json", "json", dump(to_json(g))},
          {"model.txt", "text", render_text(g.model)},
          {"spec.json", "spec", gen_spec_json(spec) + "\n"}},
         out);
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Goal-model decision analysis: sample, optimize, rank, test and find key decisions."};
    app.name(args.empty() ? "short" : args[0]);
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub, bool model_input = true) {
        sub->add_option(model_input ? "model" : "spec", o.input,
                         model_input ? "goal model file (text or JSON)" : "generator spec: JSON file or inline JSON")
            ->required();
        sub->add_option("--seed", o.seed, "random seed (default: $SHORT_SEED, else 1)");
        sub->add_option("--out", o.out_dir, "directory for JSON/CSV/SVG artifacts");
        sub->add_option("--format", o.format, "stdout format")->check(CLI::IsMember({"json", "csv", "svg"}));
    };
    auto analysis = [&](CLI::App* sub) {
        common(sub);
        sub->add_option("--costs", o.costs, "JSON leaf costs or triangular cost spec");
        sub->add_option("--config", o.config, "JSON run configuration");
        sub->add_option("--objectives", o.objectives, "enabled objectives, e.g. o1,o3,o4");
        sub->add_flag("--roots-only", o.roots_only, "count only root hardgoals in o3");
        sub->add_option("--prior", o.priors, "pinned decision leaf[:satisfied|:denied], repeatable");
    };

    auto* validate_cmd = app.add_subcommand("validate", "check a model against the structural rules");
    common(validate_cmd);
    auto* sample_cmd = app.add_subcommand("sample", "label the model once per --count with random choices");
    analysis(sample_cmd);
    sample_cmd->add_option("--count", o.count, "number of samples");
    auto* optimize_cmd = app.add_subcommand("optimize", "evolve prior decision sets");
    analysis(optimize_cmd);
    auto* rank_cmd = app.add_subcommand("rank", "rank decisions by best/rest frequency");
    analysis(rank_cmd);
    auto* test_cmd = app.add_subcommand("test", "median/IQR curve over ranked decision prefixes");
    analysis(test_cmd);
    auto* keys_cmd = app.add_subcommand("keys", "run the whole pipeline and report the key decisions");
    analysis(keys_cmd);
    auto* compare_cmd = app.add_subcommand("compare", "compare with an NSGA-II baseline");
    analysis(compare_cmd);
    compare_cmd->add_flag("--timings", o.timings, "include wall-clock times in the JSON");
    auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic model with planted keys");
    common(gen_cmd, false);
    auto* serve_cmd = app.add_subcommand("serve", "start the what-if HTTP service");
    serve_cmd->add_option("--port", o.port, "TCP port")->check(CLI::Range(1, 65535));
    serve_cmd->add_option("--host", o.host, "bind address");
    serve_cmd->add_option("--static", o.static_dir, "directory of UI assets to serve at /");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    if (argv.empty()) argv.push_back("short");
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front())
            err << "run '" << app.get_name() << ' ' << sub->get_name() << " --help' for usage\n";
        else
            err << app.help();
        return 2;
    }

    try {
        if (validate_cmd->parsed()) return cmd_validate(o, out, err);
        if (sample_cmd->parsed()) return cmd_sample(o, out, err);
        if (optimize_cmd->parsed()) return cmd_optimize(o, out, err);
        if (rank_cmd->parsed()) return cmd_rank(o, out, err);
        if (test_cmd->parsed()) return cmd_pipeline(o, false, out, err);
        if (keys_cmd->parsed()) return cmd_pipeline(o, true, out, err);
        if (compare_cmd->parsed()) return cmd_compare(o, out, err);
        if (gen_cmd->parsed()) return cmd_gen(o, out);
        if (serve_cmd->parsed()) {
            ServiceConfig sc;
            sc.static_dir = o.static_dir;
            err << "serving on http://" << o.host << ':' << o.port << '\n';
            serve(sc, o.host, o.port);
            return 0;
        }
    } catch (const ValidationFailure& e) {
        err << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        err << o.input << ": " << e.what() << '\n';
        return 1;
    } catch (const UsageError& e) {
        err << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << e.what() << '\n';
        return 2;
    } catch (const ModelError& e) {
        err << e.what() << '\n';
        return 2;  // e.g. a prior naming an unknown node
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace shortkit
