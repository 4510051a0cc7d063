// JSON views of pipeline results (the canonical output) and their CSV, SVG
// and markdown projections.
#pragma once

#include <string>

#include <json.hpp>

#include "shortkit/generator.hpp"
#include "shortkit/nsga2.hpp"

namespace shortkit {

using Json = nlohmann::ordered_json;

Json to_json(const GoalModel& model, const Decision& d);
Json to_json(const GoalModel& model, const Prior& p);
Json to_json(const ObjectiveVector& o);
Json to_json(const GoalModel& model, const Solution& s);
Json to_json(const GoalModel& model, const CostAssignment& c);
// Members in population order plus the index of the best-cdom member.
Json to_json(const GoalModel& model, const OptimizeResult& r, const OptimizerConfig& cfg);
Json to_json(const GoalModel& model, const RankResult& r);
Json to_json(const GoalModel& model, const TestCurve& c);
// Non-finite ratios (zero baseline spread) are written as null.
Json to_json(const GoalModel& model, const KeyReport& k);
Json to_json(const GoalModel& model, const PipelineResult& p);
// Wall-clock fields only on request, so the default document is reproducible.
Json to_json(const ComparisonReport& r, bool timings = false);
// The model's own JSON form plus "planted_keys"; still loadable as a model.
Json to_json(const GeneratedModel& g);

// Pretty-printed with a trailing newline; stable for identical inputs.
std::string dump(const Json& j);

// x,objective,median,iqr,median_smoothed,iqr_smoothed; enabled objectives only.
std::string curve_csv(const TestCurve& c);
std::string ranking_csv(const GoalModel& model, const RankResult& r);

// One panel per enabled objective: IQR band, median line, smoothed overlay.
// Throws std::invalid_argument for an empty curve or objective set.
std::string render_curve_svg(const TestCurve& c);

std::string ranking_markdown(const GoalModel& model, const RankResult& r);

}  // namespace shortkit
