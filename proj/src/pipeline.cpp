#include "shortkit/pipeline.hpp"

#include <chrono>

namespace shortkit {

std::vector<Decision> ordering_decisions(const RankResult& r) {
    std::vector<Decision> out;
    out.reserve(r.ordering.size());
    for (const auto& d : r.ordering) out.push_back(d.decision);
    return out;
}

PipelineResult run_pipeline(const GoalModel& model, const CostAssignment& costs,
                            const PipelineConfig& cfg, std::uint64_t seed, const Prior& pinned) {
    const auto t0 = std::chrono::steady_clock::now();
    RankConfig rc = cfg.rank;
    rc.optimizer.enabled = cfg.objectives;
    rc.optimizer.pinned = pinned;
    TestConfig tc = cfg.test;
    tc.mask = cfg.objectives;

    PipelineResult out;
    out.ranking = rank(model, costs, rc, derive_seed(seed, {2}));
    const auto ord = ordering_decisions(out.ranking);
    out.curve = smooth_curve(test_curve(model, costs, ord, tc, derive_seed(seed, {3}), pinned));
    out.keys = detect_keys(out.curve, cfg.key_threshold);
    out.evaluations = out.ranking.evaluations +
                      static_cast<std::uint64_t>(out.curve.points.size()) * tc.samples;
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace shortkit
