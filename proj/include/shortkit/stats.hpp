// Percentiles, Scott-Knott clustering, A12 effect size and bootstrap test.
#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace shortkit {

// Linear interpolation between closest ranks, position (n-1)p.
double percentile(std::vector<double> values, double p);

struct MedianIqr {
    double median = 0.0;
    double iqr = 0.0;
};
MedianIqr median_iqr(std::span<const double> values);

struct Split {
    std::size_t index = 0;  // left part is [0, index)
    double gain = 0.0;
};
// Cut maximising E(delta) = ms/ls (m.mu - l.mu)^2 + ns/ls (n.mu - l.mu)^2;
// leftmost cut on ties.
Split sk_split(std::span<const double> values);
double sk_gain(std::span<const double> values, std::size_t index);

// P(x > y) + 0.5 P(x == y).
double a12(std::span<const double> xs, std::span<const double> ys);

// Two-sided studentised bootstrap test on the difference of means.
bool bootstrap_significant(std::span<const double> xs, std::span<const double> ys,
                           double confidence = 0.99, int resamples = 512,
                           std::uint64_t seed = 0x5eed);

struct ScottKnottConfig {
    double small_effect = 0.6;  // A12 needed to split
    double confidence = 0.99;
    int resamples = 512;
    std::uint64_t seed = 0x5eed;
    bool sort_by_mean = true;   // false keeps the given order (curve smoothing)
};

// Rank label per group (0-based), equal for groups merged into one cluster.
std::vector<int> scott_knott(const std::vector<std::vector<double>>& groups,
                             const ScottKnottConfig& cfg = {});

}  // namespace shortkit
