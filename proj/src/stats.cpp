#include "shortkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "shortkit/rng.hpp"

namespace shortkit {

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("percentile of empty list");
    std::sort(values.begin(), values.end());
    const double pos = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + (values[hi] - values[lo]) * frac;
}

MedianIqr median_iqr(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("median_iqr of empty list");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    auto at = [&](double p) {
        const double pos = (static_cast<double>(v.size()) - 1.0) * p;
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
    };
    return {at(0.5), at(0.75) - at(0.25)};
}

namespace {

double mean(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(std::span<const double> v, double mu) {
    if (v.size() < 2) return 0.0;
    double s = 0;
    for (double x : v) s += (x - mu) * (x - mu);
    return s / static_cast<double>(v.size() - 1);
}

// Welch-style t; infinite when both spreads vanish but means differ.
double t_stat(std::span<const double> xs, std::span<const double> ys) {
    const double mx = mean(xs), my = mean(ys);
    const double se = std::sqrt(variance(xs, mx) / static_cast<double>(xs.size()) +
                                variance(ys, my) / static_cast<double>(ys.size()));
    if (se == 0.0) {
        if (mx == my) return 0.0;
        return my > mx ? INFINITY : -INFINITY;
    }
    return (my - mx) / se;
}

}  // namespace

double sk_gain(std::span<const double> values, std::size_t index) {
    const double ls = static_cast<double>(values.size());
    const double mu = mean(values);
    auto m = values.first(index);
    auto n = values.subspan(index);
    const double dm = mean(m) - mu, dn = mean(n) - mu;
    return static_cast<double>(m.size()) / ls * dm * dm +
           static_cast<double>(n.size()) / ls * dn * dn;
}

Split sk_split(std::span<const double> values) {
    if (values.size() < 2) throw std::invalid_argument("sk_split needs at least 2 values");
    // prefix sums keep this linear
    const std::size_t ls = values.size();
    const double total = std::accumulate(values.begin(), values.end(), 0.0);
    const double mu = total / static_cast<double>(ls);
    Split best{1, -1.0};
    double left = 0;
    for (std::size_t i = 1; i < ls; ++i) {
        left += values[i - 1];
        const double ms = static_cast<double>(i), ns = static_cast<double>(ls - i);
        const double dm = left / ms - mu, dn = (total - left) / ns - mu;
        const double gain = ms / static_cast<double>(ls) * dm * dm + ns / static_cast<double>(ls) * dn * dn;
        if (gain > best.gain + 1e-12 * std::max(1.0, std::abs(best.gain))) best = {i, gain};
    }
    return best;
}

double a12(std::span<const double> xs, std::span<const double> ys) {
    if (xs.empty() || ys.empty()) throw std::invalid_argument("a12 of empty list");
    // sort ys once, then count by binary search
    std::vector<double> sy(ys.begin(), ys.end());
    std::sort(sy.begin(), sy.end());
    double more = 0, same = 0;
    for (double x : xs) {
        auto lo = std::lower_bound(sy.begin(), sy.end(), x);
        auto hi = std::upper_bound(lo, sy.end(), x);
        more += static_cast<double>(lo - sy.begin());
        same += static_cast<double>(hi - lo);
    }
    return (more + 0.5 * same) / (static_cast<double>(xs.size()) * static_cast<double>(ys.size()));
}

bool bootstrap_significant(std::span<const double> xs, std::span<const double> ys,
                           double confidence, int resamples, std::uint64_t seed) {
    if (xs.empty() || ys.empty()) throw std::invalid_argument("bootstrap of empty list");
    const double mx = mean(xs), my = mean(ys);
    const double vx = variance(xs, mx), vy = variance(ys, my);
    if (vx == 0.0 && vy == 0.0) return mx != my;
    const double t0 = std::abs(t_stat(xs, ys));
    // shift both samples onto the pooled mean so the null hypothesis holds
    const double pooled = (mx * static_cast<double>(xs.size()) + my * static_cast<double>(ys.size())) /
                          static_cast<double>(xs.size() + ys.size());
    std::vector<double> sx(xs.size()), sy(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) sx[i] = xs[i] - mx + pooled;
    for (std::size_t i = 0; i < ys.size(); ++i) sy[i] = ys[i] - my + pooled;
    Rng rng(seed);
    std::vector<double> bx(xs.size()), by(ys.size());
    int extreme = 0;
    for (int b = 0; b < resamples; ++b) {
        for (auto& v : bx) v = sx[rng.below(sx.size())];
        for (auto& v : by) v = sy[rng.below(sy.size())];
        if (std::abs(t_stat(bx, by)) >= t0) ++extreme;
    }
    return static_cast<double>(extreme) / resamples < 1.0 - confidence;
}

namespace {

struct SkState {
    const std::vector<std::vector<double>>* groups;
    const std::vector<std::size_t>* order;
    const ScottKnottConfig* cfg;
    std::vector<int> rank;
    int next = 0;
};

std::vector<double> pool(const SkState& st, std::size_t lo, std::size_t hi) {
    std::vector<double> out;
    for (std::size_t g = lo; g < hi; ++g) {
        const auto& v = (*st.groups)[(*st.order)[g]];
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

void sk_recurse(SkState& st, std::size_t lo, std::size_t hi) {
    std::size_t cut = 0;
    if (hi - lo >= 2) {
        // best cut among group boundaries, weighted by group sizes
        const auto all = pool(st, lo, hi);
        const double mu = mean(all);
        const double ls = static_cast<double>(all.size());
        double best = 0.0, left_sum = 0.0, left_n = 0.0;
        const double total = mu * ls;
        for (std::size_t g = lo; g + 1 < hi; ++g) {
            const auto& v = (*st.groups)[(*st.order)[g]];
            left_sum += std::accumulate(v.begin(), v.end(), 0.0);
            left_n += static_cast<double>(v.size());
            const double rn = ls - left_n;
            const double dm = left_sum / left_n - mu, dn = (total - left_sum) / rn - mu;
            const double gain = left_n / ls * dm * dm + rn / ls * dn * dn;
            if (gain > best + 1e-12 * std::max(1.0, best)) {
                best = gain;
                cut = g + 1;
            }
        }
        if (cut != 0) {
            const auto l = pool(st, lo, cut);
            const auto r = pool(st, cut, hi);
            const double effect = std::max(a12(l, r), a12(r, l));
            const auto seed = derive_seed(st.cfg->seed, {lo, hi});
            if (!(effect >= st.cfg->small_effect &&
                  bootstrap_significant(l, r, st.cfg->confidence, st.cfg->resamples, seed)))
                cut = 0;
        }
    }
    if (cut == 0) {
        for (std::size_t g = lo; g < hi; ++g) st.rank[(*st.order)[g]] = st.next;
        ++st.next;
        return;
    }
    sk_recurse(st, lo, cut);
    sk_recurse(st, cut, hi);
}

}  // namespace

std::vector<int> scott_knott(const std::vector<std::vector<double>>& groups,
                             const ScottKnottConfig& cfg) {
    for (const auto& g : groups)
        if (g.empty()) throw std::invalid_argument("scott_knott: empty group");
    std::vector<std::size_t> order(groups.size());
    std::iota(order.begin(), order.end(), 0);
    if (cfg.sort_by_mean) {
        std::vector<double> mu(groups.size());
        for (std::size_t g = 0; g < groups.size(); ++g) mu[g] = mean(groups[g]);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return mu[a] < mu[b]; });
    }
    SkState st{&groups, &order, &cfg, std::vector<int>(groups.size(), 0), 0};
    if (!groups.empty()) sk_recurse(st, 0, groups.size());
    return st.rank;
}

}  // namespace shortkit
