#include "shortkit/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "shortkit/kernels.hpp"

namespace shortkit {

void Normaliser::fit(std::span<const ObjectiveVector> vs) {
    empty_ = true;
    for (const auto& v : vs) extend(v);
}

void Normaliser::extend(const ObjectiveVector& v) {
    for (std::size_t j = 0; j < kObjectives; ++j) {
        if (empty_) {
            lo_[j] = hi_[j] = v[j];
        } else {
            lo_[j] = std::min(lo_[j], v[j]);
            hi_[j] = std::max(hi_[j], v[j]);
        }
    }
    empty_ = false;
}

Normalised Normaliser::operator()(const ObjectiveVector& v) const {
    Normalised out{};
    for (std::size_t j = 0; j < kObjectives; ++j) {
        const double span = hi_[j] - lo_[j];
        out[j] = span > 0 ? (v[j] - lo_[j]) / span : 0.0;
    }
    return out;
}

double cdom_loss(const Normalised& x, const Normalised& y, const OptimizerConfig& cfg) {
    const auto n = static_cast<double>(cfg.enabled.count());
    if (n == 0) throw std::invalid_argument("no objectives enabled");
    double loss = 0.0;
    for (std::size_t j = 0; j < kObjectives; ++j) {
        if (!cfg.enabled.on[j]) continue;
        const double delta = cfg.directions[j] * (x[j] - y[j]) / n;
        loss -= std::exp(delta) / n;
    }
    return loss;
}

bool dominates(const Normalised& x, const Normalised& y, const OptimizerConfig& cfg) {
    return cdom_loss(y, x, cfg) > cdom_loss(x, y, cfg);
}

namespace {

// Sorted by node, first mention of a node kept.
const Prior& sorted_unique(const Prior& p, Prior& scratch) {
    auto by_node = [](const Decision& x, const Decision& y) { return x.node < y.node; };
    if (std::adjacent_find(p.begin(), p.end(), [](const Decision& x, const Decision& y) {
            return x.node >= y.node;
        }) == p.end())
        return p;
    scratch = p;
    std::stable_sort(scratch.begin(), scratch.end(), by_node);
    scratch.erase(std::unique(scratch.begin(), scratch.end(),
                              [](const Decision& x, const Decision& y) { return x.node == y.node; }),
                  scratch.end());
    return scratch;
}

const Prior& sorted(const Prior& p, Prior& scratch) {
    if (std::is_sorted(p.begin(), p.end())) return p;
    scratch = p;
    std::sort(scratch.begin(), scratch.end());
    return scratch;
}

}  // namespace

Prior mutate(const Prior& a, const Prior& b, const Prior& c, double p1, Rng& rng) {
    Prior ta, tb, tc;
    const Prior& sa = sorted_unique(a, ta);
    const Prior& sb = sorted(b, tb);
    const Prior& sc = sorted(c, tc);
    Prior donors;
    donors.reserve(sb.size() + sc.size());
    std::set_union(sb.begin(), sb.end(), sc.begin(), sc.end(), std::back_inserter(donors));

    // Donors are sorted by node with the denial first, so the first surviving
    // decision per node is the one kept: denials spread.
    Prior taken;
    taken.reserve(donors.size());
    for (const auto& d : donors) {
        // one draw per donor decision, whether or not it survives
        if (!(p1 < rng.uniform())) continue;
        if (taken.empty() || taken.back().node != d.node) taken.push_back(d);
    }

    Prior m;  // merge, a wins clashes
    m.reserve(sa.size() + taken.size());
    auto i = sa.begin();
    auto k = taken.begin();
    while (i != sa.end() || k != taken.end()) {
        if (k == taken.end() || (i != sa.end() && i->node <= k->node)) {
            if (k != taken.end() && k->node == i->node) ++k;
            m.push_back(*i++);
        } else {
            m.push_back(*k++);
        }
    }
    return m;
}

namespace {

Prior random_prior(const GoalModel& model, const Prior& pinned, double free_p, Rng& rng) {
    Prior p = pinned;
    std::vector<std::uint8_t> skip(model.node_count(), 0);
    for (const auto& d : pinned) skip[d.node] = 1;
    for (auto leaf : model.leaves()) {
        if (skip[leaf]) continue;
        const double u = rng.uniform();
        if (u < free_p) continue;
        p.push_back({leaf, u < free_p + (1.0 - free_p) / 2 ? Label::Satisfied : Label::Denied});
    }
    return p;
}

std::vector<Solution> evaluate(const GoalModel& model, const std::vector<Prior>& priors,
                               const std::vector<std::uint64_t>& seeds,
                               const CostAssignment& costs, const SampleOptions& opt) {
    std::vector<SampleJob> jobs(priors.size());
    for (std::size_t i = 0; i < priors.size(); ++i) jobs[i] = {&priors[i], seeds[i], nullptr};
    return sample_batch(model, jobs, costs, opt);
}

}  // namespace

OptimizeResult optimize(const GoalModel& model, const CostAssignment& costs,
                        const OptimizerConfig& cfg, std::uint64_t seed) {
    if (!cfg.enabled.any()) throw std::invalid_argument("no objectives enabled");
    const std::size_t n = static_cast<std::size_t>(cfg.pop_multiplier) * model.leaves().size();
    if (n < 4)
        throw std::invalid_argument("population size " + std::to_string(n) +
                                    " is below 4; need more leaves or a larger multiplier");
    OptimizeResult res;

    std::vector<Prior> priors(n);
    std::vector<std::uint64_t> seeds(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng r(derive_seed(seed, {1, i}));
        priors[i] = random_prior(model, cfg.pinned, cfg.init_free, r);
        seeds[i] = derive_seed(seed, {2, i});
    }
    auto sols = evaluate(model, priors, seeds, costs, cfg.sample);
    res.evaluations += n;
    res.population.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.population[i] = {std::move(priors[i]), std::move(sols[i])};

    std::vector<Prior> mutants(n);
    for (int g = 0; g < cfg.max_generations; ++g) {
        // Donors come from the population as it stood at the start of the
        // generation, so the order of evaluation does not matter.
        for (std::size_t i = 0; i < n; ++i) {
            Rng r(derive_seed(seed, {3, static_cast<std::uint64_t>(g), i}));
            std::size_t pick[3];
            for (int k = 0; k < 3; ++k) {
                for (;;) {
                    auto c = static_cast<std::size_t>(r.below(n));
                    if (c == i) continue;
                    if (std::find(pick, pick + k, c) != pick + k) continue;
                    pick[k] = c;
                    break;
                }
            }
            mutants[i] = mutate(res.population[pick[0]].prior, res.population[pick[1]].prior,
                                res.population[pick[2]].prior, cfg.p1, r);
            seeds[i] = derive_seed(seed, {4, static_cast<std::uint64_t>(g), i});
        }
        auto msols = evaluate(model, mutants, seeds, costs, cfg.sample);
        res.evaluations += n;

        Normaliser norm;
        for (const auto& ind : res.population) norm.extend(ind.solution.objectives);
        for (const auto& s : msols) norm.extend(s.objectives);

        int replaced = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (dominates(norm(msols[i].objectives), norm(res.population[i].solution.objectives),
                          cfg)) {
                res.population[i] = {std::move(mutants[i]), std::move(msols[i])};
                ++replaced;
            }
        }
        res.replacements.push_back(replaced);
        res.generations = g + 1;
        if (replaced == 0) break;
    }
    return res;
}

std::size_t best_individual(std::span<const Individual> pop, const OptimizerConfig& cfg) {
    if (pop.empty()) throw std::invalid_argument("empty population");
    Normaliser norm;
    for (const auto& ind : pop) norm.extend(ind.solution.objectives);
    std::vector<Normalised> v;
    v.reserve(pop.size());
    for (const auto& ind : pop) v.push_back(norm(ind.solution.objectives));
    std::size_t best = 0;
    double best_loss = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double total = 0;
        for (std::size_t k = 0; k < v.size(); ++k)
            if (k != i) total += cdom_loss(v[i], v[k], cfg);
        if (i == 0 || total < best_loss) {
            best = i;
            best_loss = total;
        }
    }
    return best;
}

}  // namespace shortkit
