#include "shortkit/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "shortkit/kernels.hpp"

namespace shortkit {

BoreScore bore_score(double n1, double n2) {
    if (n1 < 0 || n2 < 0) throw std::invalid_argument("bore_score: negative count");
    const double s = n1 * 0.1;
    const double denom = n1 * 0.1 + n2 * 0.9;
    return {s, denom > 0 ? s / denom : 0.0};
}

std::vector<Decision> solution_decisions(const GoalModel& model, const Solution& s) {
    std::vector<Decision> out = s.prior_used;
    for (auto leaf : model.leaves()) {
        const Label l = s.labels[leaf];
        if (is_full(l)) out.push_back({leaf, l});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

// Slot of a leaf decision in the flat counting arrays.
int decision_slot(const GoalModel& model, const Decision& d) {
    const int s = model.leaf_slot(d.node);
    if (s < 0) return -1;
    return 2 * s + (d.polarity == Label::Denied ? 1 : 0);
}

// Members in the top `fraction` for objective j with their weight: 1 above
// the cutoff value, and the remaining slots shared evenly among members tied
// at the cutoff (so ties do not favour low indices).
std::vector<std::pair<std::size_t, double>> top_members(std::span<const Individual> pop,
                                                        std::span<const std::size_t> ids,
                                                        std::size_t j, double direction,
                                                        double fraction) {
    std::vector<std::size_t> order(ids.begin(), ids.end());
    auto val = [&](std::size_t i) { return pop[i].solution.objectives[j] * direction; };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return val(a) > val(b); });
    const auto nb = std::min(order.size(), std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(order.size()) - 1e-9))));
    const double cut = val(order[nb - 1]);
    std::size_t above = 0, tied = 0;
    for (auto i : order) {
        if (val(i) > cut) ++above;
        else if (val(i) == cut) ++tied;
    }
    const double share = static_cast<double>(nb - above) / static_cast<double>(tied);
    std::vector<std::pair<std::size_t, double>> out;
    for (auto i : order) {
        if (val(i) > cut) out.emplace_back(i, 1.0);
        else if (val(i) == cut) out.emplace_back(i, share);
    }
    return out;
}

}  // namespace

std::vector<DecisionScore> score_decisions(const GoalModel& model,
                                           std::span<const Individual> pooled,
                                           std::span<const int> run_of, const RankConfig& cfg) {
    if (pooled.empty()) throw std::invalid_argument("rank: pooled population is empty");
    const std::size_t slots = 2 * model.leaves().size();
    std::vector<std::vector<Decision>> decs(pooled.size());
    for (std::size_t i = 0; i < pooled.size(); ++i)
        decs[i] = solution_decisions(model, pooled[i].solution);

    std::vector<DecisionScore> scores(slots);
    for (std::size_t s = 0; s < slots; ++s) {
        scores[s].decision = {model.leaves()[s / 2], s % 2 ? Label::Denied : Label::Satisfied};
    }
    const auto& w = cfg.optimizer.directions;

    for (std::size_t j = 0; j < kObjectives; ++j) {
        if (!cfg.optimizer.enabled.on[j]) continue;
        std::vector<double> n1(slots, 0.0), n2(slots, 0.0);
        if (!cfg.per_run_n2) {
            std::vector<std::size_t> all(pooled.size());
            std::iota(all.begin(), all.end(), 0);
            for (auto [i, wt] : top_members(pooled, all, j, w[j], cfg.best_fraction))
                for (const auto& d : decs[i])
                    if (int s = decision_slot(model, d); s >= 0) n1[s] += wt;
            for (std::size_t s = 0; s < slots; ++s)
                n2[s] = static_cast<double>(pooled.size()) - n1[s];
        } else {
            const int runs = run_of.empty() ? 1 : *std::max_element(run_of.begin(), run_of.end()) + 1;
            std::vector<std::vector<std::size_t>> members(runs);
            for (std::size_t i = 0; i < pooled.size(); ++i)
                members[run_of.empty() ? 0 : run_of[i]].push_back(i);
            for (const auto& ids : members) {
                if (ids.empty()) continue;
                auto best = top_members(pooled, ids, j, w[j], cfg.best_fraction);
                double total = 0;
                for (auto [i, wt] : best) total += wt;
                for (auto [i, wt] : best)
                    for (const auto& d : decs[i])
                        if (int s = decision_slot(model, d); s >= 0) n1[s] += wt / total;
            }
            for (std::size_t s = 0; s < slots; ++s)
                n2[s] = std::max(0.0, static_cast<double>(runs) - n1[s]);
        }
        for (std::size_t s = 0; s < slots; ++s) {
            auto b = bore_score(n1[s], n2[s]);
            scores[s].support[j] = b.support;
            scores[s].probability[j] = b.probability;
            scores[s].value += b.support * b.probability;
        }
    }
    return scores;
}

RankResult rank(const GoalModel& model, const CostAssignment& costs, const RankConfig& cfg,
                std::uint64_t seed) {
    if (cfg.runs < 1) throw std::invalid_argument("rank: runs must be >= 1");
    RankResult res;
    std::vector<Individual> pooled;
    std::vector<int> run_of;
    for (int r = 0; r < cfg.runs; ++r) {
        auto opt = optimize(model, costs, cfg.optimizer,
                            derive_seed(seed, {0x52414e4b, static_cast<std::uint64_t>(r)}));
        res.evaluations += opt.evaluations;
        for (auto& ind : opt.population) {
            pooled.push_back(std::move(ind));
            run_of.push_back(r);
        }
    }
    res.pooled = pooled.size();
    auto scores = score_decisions(model, pooled, run_of, cfg);

    std::vector<std::uint8_t> pinned(model.node_count(), 0);
    for (const auto& d : cfg.optimizer.pinned) pinned[d.node] = 1;
    for (std::size_t s = 0; s + 1 < scores.size(); s += 2) {
        const auto& sat = scores[s];
        const auto& den = scores[s + 1];
        if (pinned[sat.decision.node]) continue;
        res.ordering.push_back(den.value > sat.value ? den : sat);
    }
    std::stable_sort(res.ordering.begin(), res.ordering.end(),
                     [&](const DecisionScore& a, const DecisionScore& b) {
                         if (a.value != b.value) return a.value > b.value;
                         return model.node(a.decision.node).id < model.node(b.decision.node).id;
                     });
    return res;
}

TestCurve test_curve(const GoalModel& model, const CostAssignment& costs,
                     std::span<const Decision> ordering, const TestConfig& cfg,
                     std::uint64_t seed, const Prior& pinned) {
    if (cfg.samples < 1) throw std::invalid_argument("test_curve: samples must be >= 1");
    TestCurve curve;
    curve.pinned = pinned;
    curve.decisions.assign(ordering.begin(), ordering.end());
    curve.samples = cfg.samples;
    curve.mask = cfg.mask;
    const std::size_t d = ordering.size();
    const auto per = static_cast<std::size_t>(cfg.samples);

    std::vector<Prior> priors(d + 1);
    priors[0] = pinned;
    for (std::size_t x = 1; x <= d; ++x) {
        priors[x] = priors[x - 1];
        priors[x].push_back(ordering[x - 1]);
    }
    std::vector<CostAssignment> redrawn;
    if (cfg.redraw_costs) redrawn.reserve((d + 1) * per);
    std::vector<SampleJob> jobs;
    jobs.reserve((d + 1) * per);
    for (std::size_t x = 0; x <= d; ++x) {
        for (std::size_t s = 0; s < per; ++s) {
            const CostAssignment* c = nullptr;
            if (cfg.redraw_costs) {
                redrawn.push_back(sample_costs(model, derive_seed(seed, {0xC057, x, s})));
                c = &redrawn.back();
            }
            jobs.push_back({&priors[x], derive_seed(seed, {0x7E57, x, s}), c});
        }
    }
    auto sols = sample_batch(model, jobs, costs, cfg.sample);

    curve.points.resize(d + 1);
    for (std::size_t x = 0; x <= d; ++x) {
        auto& pt = curve.points[x];
        pt.x = static_cast<int>(x);
        for (std::size_t j = 0; j < kObjectives; ++j) {
            auto& raw = pt.raw[j];
            raw.reserve(per);
            for (std::size_t s = 0; s < per; ++s) raw.push_back(sols[x * per + s].objectives[j]);
            auto mi = median_iqr(raw);
            pt.median[j] = pt.median_smoothed[j] = mi.median;
            pt.iqr[j] = pt.iqr_smoothed[j] = mi.iqr;
        }
    }
    return curve;
}

TestCurve smooth_curve(const TestCurve& curve, const ScottKnottConfig& cfg) {
    TestCurve out = curve;
    if (curve.points.empty()) throw std::invalid_argument("smooth_curve: empty curve");
    for (const auto& pt : curve.points)
        for (const auto& r : pt.raw)
            if (r.empty()) throw std::invalid_argument("smooth_curve: raw batches missing");
    for (std::size_t j = 0; j < kObjectives; ++j) {
        std::vector<std::vector<double>> groups;
        groups.reserve(curve.points.size());
        for (const auto& pt : curve.points) groups.push_back(pt.raw[j]);
        auto sk = cfg;
        sk.seed = derive_seed(cfg.seed, {j});
        const auto ranks = scott_knott(groups, sk);
        int segments = 0;
        std::size_t lo = 0;
        while (lo < groups.size()) {
            std::size_t hi = lo + 1;
            while (hi < groups.size() && ranks[hi] == ranks[lo]) ++hi;
            std::vector<double> pooled;
            for (std::size_t g = lo; g < hi; ++g)
                pooled.insert(pooled.end(), groups[g].begin(), groups[g].end());
            const auto mi = median_iqr(pooled);
            for (std::size_t g = lo; g < hi; ++g) {
                out.points[g].median_smoothed[j] = mi.median;
                out.points[g].iqr_smoothed[j] = mi.iqr;
            }
            ++segments;
            lo = hi;
        }
        out.segments[j] = segments;
    }
    out.smoothed = true;
    return out;
}

KeyReport detect_keys(const TestCurve& curve, double threshold) {
    if (curve.points.empty()) throw std::invalid_argument("detect_keys: empty curve");
    if (curve.points.front().x != 0) throw std::invalid_argument("detect_keys: no x=0 baseline");
    KeyReport rep;
    rep.mask = curve.mask;
    rep.threshold = threshold;
    rep.decisions = static_cast<int>(curve.decisions.size());
    const auto& base = curve.points.front().iqr;
    rep.baseline = base;
    auto collapsed_at = [&](const CurvePoint& pt) {
        for (std::size_t j = 0; j < kObjectives; ++j) {
            if (!curve.mask.on[j] || base[j] == 0.0) continue;
            if (pt.iqr[j] / base[j] > threshold) return false;
        }
        return true;
    };
    rep.kappa = rep.decisions;
    rep.collapsed = false;
    for (std::size_t x = 1; x < curve.points.size(); ++x) {
        if (collapsed_at(curve.points[x])) {
            rep.kappa = static_cast<int>(x);
            rep.collapsed = true;
            break;
        }
    }
    rep.keys.assign(curve.decisions.begin(), curve.decisions.begin() + rep.kappa);
    const auto& at = curve.points[static_cast<std::size_t>(rep.kappa)].iqr;
    for (std::size_t j = 0; j < kObjectives; ++j) {
        rep.residual[j] = at[j];
        rep.ratio[j] = base[j] > 0 ? at[j] / base[j] : 0.0;
    }
    return rep;
}

}  // namespace shortkit
