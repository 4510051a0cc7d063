#include "shortkit/nsga2.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "shortkit/kernels.hpp"

namespace shortkit {

namespace {

using clock_type = std::chrono::steady_clock;

double since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::vector<Solution> evaluate(const GoalModel& model, const CostAssignment& costs,
                               const std::vector<Prior>& priors, std::uint64_t seed, int gen,
                               const SampleOptions& opt) {
    std::vector<SampleJob> jobs(priors.size());
    for (std::size_t i = 0; i < priors.size(); ++i)
        jobs[i] = {&priors[i], derive_seed(seed, {7, static_cast<std::uint64_t>(gen), i}), nullptr};
    return sample_batch(model, jobs, costs, opt);
}

// rank ascending, then crowding descending
bool crowded_less(const Nsga2Member& a, const Nsga2Member& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.crowding > b.crowding;
}

void assign_ranks(std::vector<Nsga2Member>& pop, const ObjectiveMask& mask) {
    std::vector<ObjectiveVector> v;
    v.reserve(pop.size());
    for (const auto& m : pop) v.push_back(m.solution.objectives);
    const auto fronts = fast_nondominated_sort(v, mask);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
        const auto d = crowding_distance(v, fronts[f], mask);
        for (std::size_t k = 0; k < fronts[f].size(); ++k) {
            pop[fronts[f][k]].rank = static_cast<int>(f);
            pop[fronts[f][k]].crowding = d[k];
        }
    }
}

}  // namespace

Prior decode(const GoalModel& model, const Genome& g, const Prior& pinned) {
    const auto leaves = model.leaves();
    if (g.size() != leaves.size())
        throw std::invalid_argument("genome has " + std::to_string(g.size()) + " trits for " +
                                    std::to_string(leaves.size()) + " leaves");
    std::vector<std::uint8_t> taken(model.node_count(), 0);
    Prior out;
    for (const auto& d : pinned) {
        if (d.node >= model.node_count()) throw std::invalid_argument("pinned node out of range");
        taken[d.node] = 1;
    }
    for (std::size_t s = 0; s < leaves.size(); ++s) {
        if (g[s] == Trit::Free || taken[leaves[s]]) continue;
        out.push_back({leaves[s], g[s] == Trit::Satisfy ? Label::Satisfied : Label::Denied});
    }
    out.insert(out.end(), pinned.begin(), pinned.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<const ObjectiveVector> v,
                                                             const ObjectiveMask& mask) {
    const std::size_t n = v.size();
    std::vector<std::vector<std::size_t>> beats(n);
    std::vector<int> beaten_by(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = i + 1; k < n; ++k) {
            if (pareto_dominates(v[i], v[k], mask)) {
                beats[i].push_back(k);
                ++beaten_by[k];
            } else if (pareto_dominates(v[k], v[i], mask)) {
                beats[k].push_back(i);
                ++beaten_by[i];
            }
        }
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> cur;
    for (std::size_t i = 0; i < n; ++i)
        if (beaten_by[i] == 0) cur.push_back(i);
    while (!cur.empty()) {
        std::vector<std::size_t> next;
        for (auto i : cur)
            for (auto k : beats[i])
                if (--beaten_by[k] == 0) next.push_back(k);
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(cur));
        cur = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(std::span<const ObjectiveVector> v,
                                      std::span<const std::size_t> front,
                                      const ObjectiveMask& mask) {
    const std::size_t n = front.size();
    std::vector<double> d(n, 0.0);
    if (n <= 2) {
        std::fill(d.begin(), d.end(), std::numeric_limits<double>::infinity());
        return d;
    }
    std::vector<std::size_t> order(n);
    for (std::size_t j = 0; j < kObjectives; ++j) {
        if (!mask.on[j]) continue;
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return v[front[a]][j] < v[front[b]][j]; });
        const double lo = v[front[order.front()]][j], hi = v[front[order.back()]][j];
        d[order.front()] = d[order.back()] = std::numeric_limits<double>::infinity();
        if (hi == lo) continue;
        for (std::size_t k = 1; k + 1 < n; ++k)
            d[order[k]] += (v[front[order[k + 1]]][j] - v[front[order[k - 1]]][j]) / (hi - lo);
    }
    return d;
}

Nsga2Result nsga2(const GoalModel& model, const CostAssignment& costs, const Nsga2Config& cfg,
                  std::uint64_t seed) {
    if (cfg.population < 4) throw std::invalid_argument("NSGA-II population must be at least 4");
    if (!cfg.enabled.any()) throw std::invalid_argument("no objectives enabled");
    const auto n = static_cast<std::size_t>(cfg.population);
    const std::size_t len = model.leaves().size();
    const double pm = cfg.mutation >= 0 ? cfg.mutation : (len ? 1.0 / len : 0.0);
    auto budget_left = [&](std::uint64_t used) {
        return cfg.max_evaluations == 0 || used + n <= cfg.max_evaluations;
    };

    Nsga2Result res;
    if (!budget_left(0)) throw std::invalid_argument("evaluation budget below one population");
    Rng rng(derive_seed(seed, {5}));
    std::vector<Prior> priors(n);
    res.population.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& g = res.population[i].genome;
        g.resize(len);
        for (auto& t : g) t = static_cast<Trit>(rng.below(3));
        priors[i] = decode(model, g, cfg.pinned);
    }
    auto sols = evaluate(model, costs, priors, seed, 0, cfg.sample);
    for (std::size_t i = 0; i < n; ++i) res.population[i].solution = std::move(sols[i]);
    res.evaluations = n;
    assign_ranks(res.population, cfg.enabled);

    for (int gen = 1; gen <= cfg.generations && budget_left(res.evaluations); ++gen) {
        auto tournament = [&]() -> const Nsga2Member& {
            const auto& a = res.population[rng.below(n)];
            const auto& b = res.population[rng.below(n)];
            return crowded_less(b, a) ? b : a;
        };
        std::vector<Nsga2Member> kids;
        kids.reserve(n);
        while (kids.size() < n) {
            Genome x = tournament().genome, y = tournament().genome;
            if (rng.uniform() < cfg.crossover)
                for (std::size_t s = 0; s < len; ++s)
                    if (rng.uniform() < 0.5) std::swap(x[s], y[s]);
            for (Genome* g : {&x, &y}) {
                for (auto& t : *g)
                    if (rng.uniform() < pm)  // move to one of the two other values
                        t = static_cast<Trit>((static_cast<int>(t) + 1 + rng.below(2)) % 3);
                if (kids.size() < n) kids.push_back({std::move(*g), {}, 0, 0.0});
            }
        }
        for (std::size_t i = 0; i < n; ++i) priors[i] = decode(model, kids[i].genome, cfg.pinned);
        sols = evaluate(model, costs, priors, seed, gen, cfg.sample);
        for (std::size_t i = 0; i < n; ++i) kids[i].solution = std::move(sols[i]);
        res.evaluations += n;

        // elitist survival over parents + offspring
        std::vector<Nsga2Member> all = std::move(res.population);
        for (auto& k : kids) all.push_back(std::move(k));
        assign_ranks(all, cfg.enabled);
        std::vector<std::size_t> idx(all.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return crowded_less(all[a], all[b]); });
        res.population.clear();
        for (std::size_t k = 0; k < n; ++k) res.population.push_back(std::move(all[idx[k]]));
        assign_ranks(res.population, cfg.enabled);
        res.generations = gen;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (res.population[i].rank == 0) res.front.push_back(i);
    return res;
}

Coverage coverage(const GoalModel& model, const ObjectiveVector& o, const SampleOptions& opt) {
    std::size_t hard = 0;
    for (auto h : model.hardgoals())
        if (!opt.roots_only_goals || model.is_root(h)) ++hard;
    const std::size_t soft = model.softgoals().size();
    Coverage c;
    c.goals = hard ? 100.0 * o.goals / hard : 100.0;
    c.softgoals = soft ? 100.0 * o.softgoals / soft : 100.0;
    return c;
}

namespace {

// Median coverage over repeated samples of one prior.
Coverage replay(const GoalModel& model, const CostAssignment& costs, const Prior& prior, int samples,
                std::uint64_t seed, const SampleOptions& opt) {
    std::vector<SampleJob> jobs(static_cast<std::size_t>(samples));
    for (std::size_t s = 0; s < jobs.size(); ++s) jobs[s] = {&prior, derive_seed(seed, {s}), nullptr};
    auto sols = sample_batch(model, jobs, costs, opt);
    std::vector<double> g, f;
    for (const auto& s : sols) {
        auto c = coverage(model, s.objectives, opt);
        g.push_back(c.goals);
        f.push_back(c.softgoals);
    }
    return {median_iqr(f).median, median_iqr(g).median};
}

// One sample per genome is noisy, so front members are judged by replayed
// median coverage: goals first, then softgoals.
Coverage best_front_coverage(const GoalModel& model, const CostAssignment& costs,
                             const Nsga2Result& r, int samples, std::uint64_t seed,
                             const SampleOptions& opt) {
    std::vector<Genome> seen;
    Coverage best{-1.0, -1.0};
    for (auto i : r.front) {
        const auto& g = r.population[i].genome;
        if (std::find(seen.begin(), seen.end(), g) != seen.end()) continue;
        seen.push_back(g);
        auto c = replay(model, costs, decode(model, g), samples, seed, opt);
        if (c.goals > best.goals || (c.goals == best.goals && c.softgoals > best.softgoals))
            best = c;
    }
    return best;
}

void finish(MethodStats& m) {
    m.f1 = median_iqr(m.f1_runs);
    m.f2 = median_iqr(m.f2_runs);
}

}  // namespace

ComparisonReport compare(const GoalModel& model, const CostAssignment& costs,
                         const CompareConfig& cfg, std::uint64_t seed) {
    if (cfg.runs < 1) throw std::invalid_argument("compare needs at least one run");
    const SampleOptions& opt = cfg.pipeline.test.sample;
    ComparisonReport rep;
    rep.runs = cfg.runs;
    rep.curve_points = model.leaves().size() + 1;

    std::vector<Decision> first_order;
    for (int r = 0; r < cfg.runs; ++r) {
        const auto rs = derive_seed(seed, {0x5407, static_cast<std::uint64_t>(r)});
        auto p = run_pipeline(model, costs, cfg.pipeline, rs);
        Prior rec(p.keys.keys.begin(), p.keys.keys.end());
        auto c = replay(model, costs, rec, cfg.replay_samples, derive_seed(rs, {9}), opt);
        rep.short_method.f1_runs.push_back(c.softgoals);
        rep.short_method.f2_runs.push_back(c.goals);
        rep.short_method.seconds.push_back(p.seconds);
        rep.short_method.evaluations += p.evaluations;
        if (r == 0) first_order = ordering_decisions(p.ranking);
    }
    rep.nsga2_budget = rep.short_method.evaluations / static_cast<std::uint64_t>(cfg.runs);

    Nsga2Config nc = cfg.nsga2;
    nc.max_evaluations = std::max<std::uint64_t>(rep.nsga2_budget, nc.population);
    nc.generations = std::numeric_limits<int>::max();
    nc.enabled = cfg.pipeline.objectives;
    nc.sample = opt;
    for (int r = 0; r < cfg.runs; ++r) {
        const auto rs = derive_seed(seed, {0x6a, static_cast<std::uint64_t>(r)});
        const auto t0 = clock_type::now();
        auto res = nsga2(model, costs, nc, rs);
        rep.nsga2.seconds.push_back(since(t0));
        rep.nsga2.evaluations += res.evaluations;
        auto c = best_front_coverage(model, costs, res, cfg.replay_samples, derive_seed(rs, {9}),
                                     opt);
        rep.nsga2.f1_runs.push_back(c.softgoals);
        rep.nsga2.f2_runs.push_back(c.goals);
    }
    finish(rep.short_method);
    finish(rep.nsga2);
    rep.short_curve_seconds = median_iqr(rep.short_method.seconds).median;

    // A trade-space curve from NSGA-II needs one rerun per prefix of the
    // ordering; time a few evenly spaced prefixes and scale up.
    const int k = std::max(1, cfg.curve_points_timed);
    double total = 0;
    for (int i = 0; i < k; ++i) {
        const std::size_t x = k == 1 ? 0 : i * first_order.size() / static_cast<std::size_t>(k - 1);
        Nsga2Config pc = nc;
        pc.pinned.assign(first_order.begin(), first_order.begin() + std::min(x, first_order.size()));
        const auto t0 = clock_type::now();
        nsga2(model, costs, pc, derive_seed(seed, {0x7c, static_cast<std::uint64_t>(i)}));
        total += since(t0);
    }
    rep.nsga2_point_seconds = total / k;
    rep.nsga2_curve_seconds = rep.nsga2_point_seconds * static_cast<double>(rep.curve_points);
    return rep;
}

std::string comparison_markdown(const ComparisonReport& r) {
    std::ostringstream o;
    o.setf(std::ios::fixed);
    o.precision(2);
    o << "| measure | SHORT | NSGA-II |\n|---|---|---|\n";
    o << "| f1: softgoals satisfied (%) | " << r.short_method.f1.median << " ± "
      << r.short_method.f1.iqr << " | " << r.nsga2.f1.median << " ± " << r.nsga2.f1.iqr << " |\n";
    o << "| f2: goals satisfied (%) | " << r.short_method.f2.median << " ± " << r.short_method.f2.iqr
      << " | " << r.nsga2.f2.median << " ± " << r.nsga2.f2.iqr << " |\n";
    o << "| evaluations per run | " << r.short_method.evaluations / std::max(1, r.runs) << " | "
      << r.nsga2.evaluations / std::max(1, r.runs) << " |\n";
    o << "| seconds per trade-space curve (" << r.curve_points << " points) | "
      << r.short_curve_seconds << " | " << r.nsga2_curve_seconds << " |\n";
    o.precision(1);
    o << "\nspeedup: " << r.speedup() << "x over " << r.runs << " runs\n";
    return o.str();
}

}  // namespace shortkit
