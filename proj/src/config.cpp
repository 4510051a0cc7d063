#include "shortkit/config.hpp"

#include <set>
#include <stdexcept>

namespace shortkit {

namespace {

using nlohmann::json;

void only_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    if (!j.is_object()) throw std::invalid_argument(std::string(where) + " must be a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items())
        if (!ok.count(k)) throw std::invalid_argument(std::string("unknown ") + where + " key '" + k + "'");
}

template <class T>
void take(const json& j, const char* key, T& dst) {
    if (j.contains(key)) dst = j.at(key).get<T>();
}

void positive(int v, const char* what) {
    if (v < 1) throw std::invalid_argument(std::string(what) + " must be at least 1");
}

Triangular triangle(const json& a) {
    auto v = a.get<std::vector<double>>();
    if (v.size() != 3) throw std::invalid_argument("a triangular cost needs [low, mode, high]");
    Triangular t{v[0], v[1], v[2]};
    if (!t.valid()) throw std::invalid_argument("cost requires 0 <= low <= mode <= high");
    return t;
}

}  // namespace

RunConfig parse_run_config(const json& j) {
    RunConfig c;
    auto& p = c.pipeline;
    auto& opt = p.rank.optimizer;
    try {
        only_keys(j,
                  {"runs", "best_fraction", "per_run_n2", "pop_multiplier", "p1", "max_generations",
                   "init_free", "samples", "redraw_costs", "key_threshold", "roots_only", "nsga2",
                   "compare"},
                  "config");
        take(j, "runs", p.rank.runs);
        take(j, "best_fraction", p.rank.best_fraction);
        take(j, "per_run_n2", p.rank.per_run_n2);
        take(j, "pop_multiplier", opt.pop_multiplier);
        take(j, "p1", opt.p1);
        take(j, "max_generations", opt.max_generations);
        take(j, "init_free", opt.init_free);
        take(j, "samples", p.test.samples);
        take(j, "redraw_costs", p.test.redraw_costs);
        take(j, "key_threshold", p.key_threshold);
        bool roots_only = false;
        take(j, "roots_only", roots_only);
        opt.sample.roots_only_goals = roots_only;
        p.test.sample.roots_only_goals = roots_only;
        c.compare.nsga2.sample.roots_only_goals = roots_only;
        if (j.contains("nsga2")) {
            const auto& n = j.at("nsga2");
            only_keys(n, {"population", "generations", "crossover", "mutation"}, "nsga2");
            take(n, "population", c.compare.nsga2.population);
            take(n, "generations", c.compare.nsga2.generations);
            take(n, "crossover", c.compare.nsga2.crossover);
            take(n, "mutation", c.compare.nsga2.mutation);
        }
        if (j.contains("compare")) {
            const auto& n = j.at("compare");
            only_keys(n, {"runs", "replay_samples", "curve_points_timed"}, "compare");
            take(n, "runs", c.compare.runs);
            take(n, "replay_samples", c.compare.replay_samples);
            take(n, "curve_points_timed", c.compare.curve_points_timed);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad config: ") + e.what());
    }
    positive(p.rank.runs, "runs");
    positive(opt.pop_multiplier, "pop_multiplier");
    positive(opt.max_generations, "max_generations");
    positive(p.test.samples, "samples");
    positive(c.compare.runs, "compare.runs");
    positive(c.compare.replay_samples, "compare.replay_samples");
    positive(c.compare.curve_points_timed, "compare.curve_points_timed");
    if (p.rank.best_fraction <= 0 || p.rank.best_fraction > 1)
        throw std::invalid_argument("best_fraction must be in (0,1]");
    if (opt.p1 < 0 || opt.p1 > 1) throw std::invalid_argument("p1 must be in [0,1]");
    if (opt.init_free < 0 || opt.init_free > 1) throw std::invalid_argument("init_free must be in [0,1]");
    if (p.key_threshold <= 0 || p.key_threshold > 1)
        throw std::invalid_argument("key_threshold must be in (0,1]");
    c.compare.pipeline = p;
    return c;
}

RunConfig parse_run_config_text(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad config: ") + e.what());
    }
    return parse_run_config(j);
}

CostAssignment parse_costs(const GoalModel& model, std::string_view text, std::uint64_t seed) {
    json j;
    try {
        j = json::parse(text);
        if (!j.is_object()) throw std::invalid_argument("costs must be a JSON object");
        if (j.contains("distribution")) {
            only_keys(j, {"distribution", "overrides"}, "costs");
            CostSpec spec;
            spec.distribution = triangle(j.at("distribution"));
            if (j.contains("overrides"))
                for (const auto& [id, t] : j.at("overrides").items()) {
                    if (!model.find(id)) throw std::invalid_argument("cost override for unknown node '" + id + "'");
                    spec.overrides[id] = triangle(t);
                }
            return sample_costs(model, spec, seed);
        }
        // fixed costs: a degenerate triangle per leaf
        CostSpec spec;
        for (const auto& [id, v] : j.items()) {
            auto n = model.find(id);
            if (!n || model.kind(*n) != NodeKind::Leaf)
                throw std::invalid_argument("cost for '" + id + "', which is not a leaf");
            const double x = v.get<double>();
            if (x < 0) throw std::invalid_argument("cost for '" + id + "' is negative");
            spec.overrides[id] = Triangular{x, x, x};
        }
        for (auto leaf : model.leaves())
            if (!spec.overrides.count(model.node(leaf).id))
                throw std::invalid_argument("no cost given for leaf '" + model.node(leaf).id + "'");
        return sample_costs(model, spec, seed);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad costs: ") + e.what());
    }
}

}  // namespace shortkit
