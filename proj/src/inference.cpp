#include "shortkit/inference.hpp"

#include <algorithm>
#include <limits>

namespace shortkit {

Label expectation(Label source, EdgeKind edge) {
    const int n = static_cast<int>(source);
    const int w = static_cast<int>(edge);
    if (n == 0) return Label::Undefined;
    if (n == 2 || n == -2) return static_cast<Label>(w * n / 2);
    return static_cast<Label>(w > 0 ? n : -n);
}

Decision parse_decision(const GoalModel& model, std::string_view text) {
    Decision d;
    std::string_view id = text;
    auto colon = text.rfind(':');
    if (colon != std::string_view::npos) {
        auto pol = text.substr(colon + 1);
        if (pol == "denied" || pol == "deny" || pol == "den" || pol == "-")
            d.polarity = Label::Denied;
        else if (pol == "satisfied" || pol == "satisfy" || pol == "sat" || pol == "+")
            d.polarity = Label::Satisfied;
        else
            throw std::invalid_argument("bad polarity '" + std::string(pol) + "'");
        id = text.substr(0, colon);
    }
    auto idx = model.find(id);
    if (!idx) throw ModelError("unknown node " + std::string(id));
    d.node = *idx;
    return d;
}

std::string format_decision(const GoalModel& model, const Decision& d) {
    return model.node(d.node).id + (d.polarity == Label::Denied ? ":denied" : ":satisfied");
}

std::size_t ObjectiveMask::count() const {
    return static_cast<std::size_t>(std::count(on.begin(), on.end(), true));
}

ObjectiveMask parse_objectives(std::string_view csv) {
    ObjectiveMask m;
    m.on.fill(false);
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        auto end = csv.find(',', pos);
        if (end == std::string_view::npos) end = csv.size();
        auto tok = csv.substr(pos, end - pos);
        pos = end + 1;
        if (tok.empty()) {
            if (end == csv.size()) break;
            continue;
        }
        bool found = false;
        for (std::size_t j = 0; j < kObjectives; ++j) {
            std::string_view full = kObjectiveNames[j];
            if (tok == full || tok == full.substr(0, 2) || tok == full.substr(3)) {
                m.on[j] = true;
                found = true;
            }
        }
        if (!found) throw std::invalid_argument("unknown objective '" + std::string(tok) + "'");
        if (end == csv.size()) break;
    }
    if (!m.any()) throw std::invalid_argument("no objectives enabled");
    return m;
}

std::string format_objectives(const ObjectiveMask& m) {
    std::string out;
    for (std::size_t j = 0; j < kObjectives; ++j) {
        if (!m.on[j]) continue;
        if (!out.empty()) out += ',';
        out += std::string_view(kObjectiveNames[j]).substr(0, 2);
    }
    return out;
}

std::vector<NodeIndex> Solution::satisfied() const {
    std::vector<NodeIndex> out;
    for (NodeIndex i = 0; i < labels.size(); ++i)
        if (labels[i] == Label::Satisfied) out.push_back(i);
    return out;
}

std::vector<NodeIndex> Solution::denied() const {
    std::vector<NodeIndex> out;
    for (NodeIndex i = 0; i < labels.size(); ++i)
        if (labels[i] == Label::Denied) out.push_back(i);
    return out;
}

Propagator::Propagator(const GoalModel& model) : model_(&model) { reset(); }

void Propagator::reset() {
    labels_.assign(model_->node_count(), Label::Undefined);
    ignored_.assign(model_->edge_count(), 0);
    fixed_.assign(model_->node_count(), 0);
    was_reset_.assign(model_->node_count(), 0);
    ignored_count_ = 0;
    order_scratch_.clear();
}

void Propagator::fix(NodeIndex n, Label l) {
    labels_[n] = l;
    fixed_[n] = 1;
}

void Propagator::ignore(EdgeIndex e) {
    if (!ignored_[e]) {
        ignored_[e] = 1;
        ++ignored_count_;
    }
}

bool Propagator::edge_consistent(EdgeIndex e) const {
    const auto& ed = model_->edge(e);
    const Label p = labels_[ed.parent];
    const Label c = labels_[ed.child];
    if (p == Label::Undefined || c == Label::Undefined) return true;
    if (c == expectation(p, ed.kind)) return true;
    const Label contrib = expectation(c, ed.kind);
    if (p == contrib) return true;
    const auto pk = model_->kind(ed.parent);
    // An OR needs only one child; a denied AND/OR only needs failing children.
    if (pk == NodeKind::Or && p > Label::Undefined) return true;
    if ((pk == NodeKind::Or || pk == NodeKind::And) && p < Label::Undefined &&
        contrib < Label::Undefined)
        return true;
    return false;
}

std::optional<Label> Propagator::wanted(NodeIndex from, EdgeIndex e) const {
    const auto& ed = model_->edge(e);
    const Label l = labels_[from];
    if (ed.parent == from) {
        // OR is a choice point: satisfying it says nothing about a given child.
        if (model_->kind(from) == NodeKind::Or && l > Label::Undefined) return std::nullopt;
        return expectation(l, ed.kind);
    }
    const NodeIndex p = ed.parent;
    const Label c = expectation(l, ed.kind);
    switch (model_->kind(p)) {
        case NodeKind::And: {
            if (c < Label::Undefined) return c;
            if (c != Label::Satisfied) return std::nullopt;
            for (auto oe : model_->out_edges(p)) {
                if (ignored_[oe]) continue;
                const auto& o = model_->edge(oe);
                if (expectation(labels_[o.child], o.kind) != Label::Satisfied) return std::nullopt;
            }
            return Label::Satisfied;
        }
        case NodeKind::Or: {
            if (c > Label::Undefined) return c;
            Label best = Label::Denied;
            for (auto oe : model_->out_edges(p)) {
                if (ignored_[oe]) continue;
                const auto& o = model_->edge(oe);
                const Label oc = expectation(labels_[o.child], o.kind);
                if (oc >= Label::Undefined) return std::nullopt;
                best = std::max(best, oc);
            }
            return best;
        }
        default: return c;
    }
}

void Propagator::step(NodeIndex n, Rng* rng) {
    // Edge order and the children labelled here live on shared stacks so the
    // recursion does not allocate.
    const auto inc = model_->incident(n);
    const std::size_t base = order_scratch_.size();
    order_scratch_.resize(base + inc.size());
    std::copy(inc.begin(), inc.end(), order_scratch_.begin() + static_cast<std::ptrdiff_t>(base));
    if (rng) rng->shuffle(std::span<EdgeIndex>(order_scratch_.data() + base, inc.size()));
    const std::size_t set_base = set_scratch_.size();

    for (std::size_t k = 0; k < inc.size(); ++k) {
        if (labels_[n] == Label::Undefined) break;
        const EdgeIndex e = order_scratch_[base + k];
        if (ignored_[e]) continue;
        const auto& ed = model_->edge(e);
        const NodeIndex t = ed.parent == n ? ed.child : ed.parent;
        if (labels_[t] == Label::Undefined) {
            auto w = wanted(n, e);
            if (!w || *w == Label::Undefined) continue;
            labels_[t] = *w;
            if (ed.parent == n) set_scratch_.push_back(t);
            step(t, rng);
        } else if (!edge_consistent(e)) {
            ignore(e);
        }
    }
    if (model_->kind(n) == NodeKind::And && labels_[n] == Label::Satisfied)
        check_and(n, set_base);
    set_scratch_.resize(set_base);
    order_scratch_.resize(base);
}

void Propagator::check_and(NodeIndex n, std::size_t set_base) {
    auto set_here = [&](NodeIndex k) {
        return std::find(set_scratch_.begin() + static_cast<std::ptrdiff_t>(set_base),
                         set_scratch_.end(), k) != set_scratch_.end();
    };
    auto resettable = [&](NodeIndex k) { return !fixed_[k] && !was_reset_[k]; };
    bool reset_needed = false;
    for (auto e : model_->out_edges(n)) {
        if (ignored_[e]) continue;
        const NodeIndex k = model_->edge(e).child;
        const Label l = labels_[k];
        if (l == Label::Undefined || l == Label::Satisfied) continue;
        // Each node may be reset once; after that the conflict is absorbed.
        if (set_here(k) && resettable(k))
            reset_needed = true;
        else
            ignore(e);
    }
    if (!reset_needed) return;
    for (std::size_t i = set_base; i < set_scratch_.size(); ++i) {
        const NodeIndex k = set_scratch_[i];
        if (!resettable(k)) continue;
        labels_[k] = Label::Undefined;
        was_reset_[k] = 1;
    }
}

ObjectiveVector score(const GoalModel& model, const std::vector<Label>& labels, int ignored,
                      const CostAssignment& costs, const SampleOptions& opt) {
    ObjectiveVector o;
    o.ignored = ignored;
    for (auto leaf : model.leaves())
        if (labels[leaf] == Label::Satisfied) o.cost += costs.of(leaf);
    for (NodeIndex i = 0; i < model.node_count(); ++i) {
        if (labels[i] != Label::Satisfied) continue;
        const auto k = model.kind(i);
        if (k == NodeKind::Hardgoal && (!opt.roots_only_goals || model.is_root(i))) ++o.goals;
        if (k == NodeKind::Softgoal) ++o.softgoals;
    }
    return o;
}

namespace {

Prior normalise_prior(const GoalModel& model, const Prior& prior) {
    Prior out;
    out.reserve(prior.size());
    std::vector<std::uint8_t> seen(model.node_count(), 0);
    for (const auto& d : prior) {
        if (d.node >= model.node_count()) throw ModelError("unknown prior node");
        if (d.polarity != Label::Satisfied && d.polarity != Label::Denied)
            throw std::invalid_argument("prior polarity must be satisfied or denied");
        if (seen[d.node]) continue;  // first mention wins
        seen[d.node] = 1;
        out.push_back(d);
    }
    return out;
}

}  // namespace

Solution sample(Propagator& prop, const GoalModel& model, const Prior& prior,
                const CostAssignment& costs, Rng& rng, const SampleOptions& opt) {
    Solution sol;
    sol.prior_used = normalise_prior(model, prior);
    prop.reset();
    for (const auto& d : sol.prior_used) prop.fix(d.node, d.polarity);

    std::vector<NodeIndex> order;
    order.reserve(sol.prior_used.size());
    for (const auto& d : sol.prior_used) order.push_back(d.node);
    rng.shuffle(std::span<NodeIndex>(order));
    for (auto n : order)
        if (prop.label(n) != Label::Undefined) prop.step(n, &rng);

    // Pool of candidate leaves; stale entries are dropped when drawn. A final
    // rescan catches leaves that an AND check set back to undefined.
    const auto leaves = model.leaves();
    std::vector<NodeIndex> pool;
    pool.reserve(leaves.size());
    for (;;) {
        pool.clear();
        for (auto l : leaves)
            if (prop.label(l) == Label::Undefined) pool.push_back(l);
        if (pool.empty()) break;
        while (!pool.empty()) {
            const auto i = static_cast<std::size_t>(rng.below(pool.size()));
            const NodeIndex leaf = pool[i];
            pool[i] = pool.back();
            pool.pop_back();
            if (prop.label(leaf) != Label::Undefined) continue;
            prop.set(leaf, Label::Satisfied);
            prop.step(leaf, &rng);
        }
    }

    sol.labels = prop.labels();
    sol.ignored_count = prop.ignored_count();
    sol.objectives = score(model, sol.labels, sol.ignored_count, costs, opt);
    return sol;
}

Solution sample(const GoalModel& model, const Prior& prior, const CostAssignment& costs,
                Rng& rng, const SampleOptions& opt) {
    Propagator prop(model);
    return sample(prop, model, prior, costs, rng, opt);
}

std::vector<Solution> enumerate_worlds(const GoalModel& model, const CostAssignment& costs,
                                       int max_leaves, const SampleOptions& opt) {
    const auto leaves = model.leaves();
    if (max_leaves > 20) throw std::invalid_argument("max-leaves must be <= 20");
    if (static_cast<int>(leaves.size()) > max_leaves)
        throw std::invalid_argument("model too large to enumerate: " +
                                    std::to_string(leaves.size()) + " leaves");
    const std::uint64_t worlds = 1ULL << leaves.size();
    std::vector<Solution> out;
    out.reserve(worlds);
    Propagator prop(model);
    for (std::uint64_t w = 0; w < worlds; ++w) {
        Solution sol;
        prop.reset();
        for (std::size_t s = 0; s < leaves.size(); ++s) {
            const Label l = (w >> s) & 1 ? Label::Satisfied : Label::Denied;
            prop.fix(leaves[s], l);
            sol.prior_used.push_back({leaves[s], l});
        }
        for (auto leaf : leaves) prop.step(leaf, nullptr);
        sol.labels = prop.labels();
        sol.ignored_count = prop.ignored_count();
        sol.objectives = score(model, sol.labels, sol.ignored_count, costs, opt);
        out.push_back(std::move(sol));
    }
    return out;
}

bool pareto_dominates(const ObjectiveVector& a, const ObjectiveVector& b,
                      const ObjectiveMask& mask) {
    bool better = false;
    for (std::size_t j = 0; j < kObjectives; ++j) {
        if (!mask.on[j]) continue;
        // o1, o2 minimised; o3, o4 maximised.
        const double da = j < 2 ? -a[j] : a[j];
        const double db = j < 2 ? -b[j] : b[j];
        if (da < db) return false;
        if (da > db) better = true;
    }
    return better;
}

}  // namespace shortkit
