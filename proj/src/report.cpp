#include "shortkit/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace shortkit {

namespace {

// Shortest round-trip form, so text output is stable across runs.
std::string num(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buf, end);
}

// Fixed precision for drawing coordinates.
std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <class F>
Json per_objective(const ObjectiveMask& mask, F&& value) {
    Json j = Json::object();
    for (std::size_t k = 0; k < kObjectives; ++k)
        if (mask.on[k]) j[kObjectiveNames[k]] = value(k);
    return j;
}

Json objective_list(const ObjectiveMask& m) {
    Json j = Json::array();
    for (std::size_t k = 0; k < kObjectives; ++k)
        if (m.on[k]) j.push_back(kObjectiveNames[k]);
    return j;
}

Json ids(const GoalModel& model, const std::vector<NodeIndex>& v) {
    Json j = Json::array();
    for (auto i : v) j.push_back(model.node(i).id);
    return j;
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

Json method_json(const MethodStats& m, bool timings) {
    Json j;
    j["f1"] = {{"median", m.f1.median}, {"iqr", m.f1.iqr}};
    j["f2"] = {{"median", m.f2.median}, {"iqr", m.f2.iqr}};
    j["f1_runs"] = m.f1_runs;
    j["f2_runs"] = m.f2_runs;
    if (timings) j["seconds"] = m.seconds;
    j["evaluations"] = m.evaluations;
    return j;
}

}  // namespace

Json to_json(const GoalModel& model, const Decision& d) {
    return {{"node", model.node(d.node).id},
            {"polarity", d.polarity == Label::Denied ? "denied" : "satisfied"}};
}

Json to_json(const GoalModel& model, const Prior& p) {
    Json j = Json::array();
    for (const auto& d : p) j.push_back(to_json(model, d));
    return j;
}

Json to_json(const ObjectiveVector& o) {
    Json j;
    j[kObjectiveNames[0]] = o.cost;
    j[kObjectiveNames[1]] = o.ignored;
    j[kObjectiveNames[2]] = o.goals;
    j[kObjectiveNames[3]] = o.softgoals;
    return j;
}

Json to_json(const GoalModel& model, const Solution& s) {
    Json j;
    j["objectives"] = to_json(s.objectives);
    j["ignored_count"] = s.ignored_count;
    j["satisfied"] = ids(model, s.satisfied());
    j["denied"] = ids(model, s.denied());
    Json prior = Json::array();
    for (const auto& d : s.prior_used) prior.push_back(format_decision(model, d));
    j["prior_used"] = std::move(prior);
    Json labels = Json::object();
    for (NodeIndex i = 0; i < s.labels.size(); ++i)
        labels[model.node(i).id] = std::string(to_string(s.labels[i]));
    j["labels"] = std::move(labels);
    return j;
}

Json to_json(const GoalModel& model, const CostAssignment& c) {
    Json j;
    j["seed"] = c.seed;
    Json costs = Json::object();
    for (auto leaf : model.leaves()) costs[model.node(leaf).id] = c.of(leaf);
    j["costs"] = std::move(costs);
    return j;
}

Json to_json(const GoalModel& model, const OptimizeResult& r, const OptimizerConfig& cfg) {
    Json j;
    j["generations"] = r.generations;
    j["evaluations"] = r.evaluations;
    j["replacements"] = r.replacements;
    j["best"] = r.population.empty() ? Json(nullptr) : Json(best_individual(r.population, cfg));
    Json pop = Json::array();
    for (const auto& ind : r.population) {
        Json m;
        m["prior"] = to_json(model, ind.prior);
        m["objectives"] = to_json(ind.solution.objectives);
        pop.push_back(std::move(m));
    }
    j["population"] = std::move(pop);
    return j;
}

Json to_json(const GoalModel& model, const RankResult& r) {
    Json j;
    j["pooled"] = r.pooled;
    j["evaluations"] = r.evaluations;
    Json ord = Json::array();
    int rank_no = 0;
    for (const auto& s : r.ordering) {
        Json e;
        e["rank"] = ++rank_no;
        e["node"] = model.node(s.decision.node).id;
        e["polarity"] = s.decision.polarity == Label::Denied ? "denied" : "satisfied";
        e["value"] = s.value;
        Json sup = Json::object(), prob = Json::object();
        for (std::size_t k = 0; k < kObjectives; ++k) {
            sup[kObjectiveNames[k]] = s.support[k];
            prob[kObjectiveNames[k]] = s.probability[k];
        }
        e["support"] = std::move(sup);
        e["probability"] = std::move(prob);
        ord.push_back(std::move(e));
    }
    j["ordering"] = std::move(ord);
    return j;
}

Json to_json(const GoalModel& model, const TestCurve& c) {
    Json j;
    j["samples"] = c.samples;
    j["objectives"] = objective_list(c.mask);
    j["pinned"] = to_json(model, c.pinned);
    j["decisions"] = to_json(model, c.decisions);
    j["smoothed"] = c.smoothed;
    if (c.smoothed) j["segments"] = per_objective(c.mask, [&](std::size_t k) { return c.segments[k]; });
    Json pts = Json::array();
    for (const auto& p : c.points) {
        Json e;
        e["x"] = p.x;
        e["median"] = per_objective(c.mask, [&](std::size_t k) { return p.median[k]; });
        e["iqr"] = per_objective(c.mask, [&](std::size_t k) { return p.iqr[k]; });
        if (c.smoothed) {
            e["median_smoothed"] = per_objective(c.mask, [&](std::size_t k) { return p.median_smoothed[k]; });
            e["iqr_smoothed"] = per_objective(c.mask, [&](std::size_t k) { return p.iqr_smoothed[k]; });
        }
        pts.push_back(std::move(e));
    }
    j["points"] = std::move(pts);
    return j;
}

Json to_json(const GoalModel& model, const KeyReport& k) {
    Json j;
    j["kappa"] = k.kappa;
    j["decisions"] = k.decisions;
    j["fraction"] = k.fraction();
    j["collapsed"] = k.collapsed;
    j["threshold"] = k.threshold;
    j["keys"] = to_json(model, k.keys);
    j["objectives"] = objective_list(k.mask);
    j["baseline_iqr"] = per_objective(k.mask, [&](std::size_t o) { return finite_or_null(k.baseline[o]); });
    j["residual_iqr"] = per_objective(k.mask, [&](std::size_t o) { return finite_or_null(k.residual[o]); });
    j["ratio"] = per_objective(k.mask, [&](std::size_t o) { return finite_or_null(k.ratio[o]); });
    return j;
}

Json to_json(const GoalModel& model, const PipelineResult& p) {
    Json j;
    j["ordering"] = to_json(model, p.ranking);
    j["curve"] = to_json(model, p.curve);
    j["keys"] = to_json(model, p.keys);
    j["evaluations"] = p.evaluations;
    return j;  // wall clock left out so the document is reproducible
}

Json to_json(const ComparisonReport& r, bool timings) {
    Json j;
    j["runs"] = r.runs;
    j["nsga2_budget"] = r.nsga2_budget;
    j["curve_points"] = r.curve_points;
    j["short"] = method_json(r.short_method, timings);
    j["nsga2"] = method_json(r.nsga2, timings);
    if (!timings) return j;
    j["short_curve_seconds"] = r.short_curve_seconds;
    j["nsga2_point_seconds"] = r.nsga2_point_seconds;
    j["nsga2_curve_seconds"] = r.nsga2_curve_seconds;
    j["speedup"] = finite_or_null(r.speedup());
    return j;
}

Json to_json(const GeneratedModel& g) {
    Json j = Json::parse(render_json(g.model));
    j["planted_keys"] = to_json(g.model, g.keys);
    return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string curve_csv(const TestCurve& c) {
    std::string out = "x,objective,median,iqr,median_smoothed,iqr_smoothed\n";
    for (const auto& p : c.points)
        for (std::size_t k = 0; k < kObjectives; ++k) {
            if (!c.mask.on[k]) continue;
            out += std::to_string(p.x) + ',' + kObjectiveNames[k] + ',' + num(p.median[k]) + ',' +
                   num(p.iqr[k]) + ',' + num(c.smoothed ? p.median_smoothed[k] : p.median[k]) + ',' +
                   num(c.smoothed ? p.iqr_smoothed[k] : p.iqr[k]) + '\n';
        }
    return out;
}

std::string ranking_csv(const GoalModel& model, const RankResult& r) {
    std::string out = "rank,node,polarity,value";
    for (auto n : kObjectiveNames) out += std::string(",support_") + n;
    out += '\n';
    int i = 0;
    for (const auto& s : r.ordering) {
        out += std::to_string(++i) + ',' + model.node(s.decision.node).id + ',' +
               (s.decision.polarity == Label::Denied ? "denied" : "satisfied") + ',' + num(s.value);
        for (double v : s.support) out += ',' + num(v);
        out += '\n';
    }
    return out;
}

std::string render_curve_svg(const TestCurve& c) {
    if (c.points.empty()) throw std::invalid_argument("cannot plot an empty curve");
    if (!c.mask.any()) throw std::invalid_argument("cannot plot a curve with no objectives");

    constexpr double pw = 360, ph = 220;            // panel size
    constexpr double ml = 60, mr = 15, mt = 30, mb = 45;  // plot margins inside a panel
    const int cols = c.mask.count() > 1 ? 2 : 1;
    const int rows = static_cast<int>((c.mask.count() + cols - 1) / cols);
    const double width = cols * pw, height = rows * ph + 30;

    std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + coord(width) + "\" height=\"" +
         coord(height) + "\" viewBox=\"0 0 " + coord(width) + ' ' + coord(height) +
         "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"10\" y=\"20\" font-size=\"14\">Median and IQR with the first x decisions fixed (" +
         std::to_string(c.samples) + " samples per point)</text>\n";

    const double xmax = std::max(1, c.points.back().x);
    int panel = 0;
    for (std::size_t k = 0; k < kObjectives; ++k) {
        if (!c.mask.on[k]) continue;
        const double ox = (panel % cols) * pw, oy = 30 + (panel / cols) * ph;
        ++panel;

        // band from the raw quartiles when present, else median +- iqr/2
        std::vector<double> lo, hi, med, sm;
        for (const auto& p : c.points) {
            if (!p.raw[k].empty()) {
                lo.push_back(percentile(p.raw[k], 0.25));
                hi.push_back(percentile(p.raw[k], 0.75));
            } else {
                lo.push_back(p.median[k] - p.iqr[k] / 2);
                hi.push_back(p.median[k] + p.iqr[k] / 2);
            }
            med.push_back(p.median[k]);
            sm.push_back(c.smoothed ? p.median_smoothed[k] : p.median[k]);
        }
        double ymin = std::min({*std::min_element(lo.begin(), lo.end()),
                                *std::min_element(med.begin(), med.end()),
                                *std::min_element(sm.begin(), sm.end())});
        double ymax = std::max({*std::max_element(hi.begin(), hi.end()),
                                *std::max_element(med.begin(), med.end()),
                                *std::max_element(sm.begin(), sm.end())});
        if (ymax - ymin < 1e-9) {
            ymin -= 1;
            ymax += 1;
        }
        const double x0 = ml, x1 = pw - mr, y0 = ph - mb, y1 = mt;
        auto px = [&](int x) { return coord(x0 + (x1 - x0) * x / xmax); };
        auto py = [&](double v) { return coord(y0 - (y0 - y1) * (v - ymin) / (ymax - ymin)); };

        s += "<g class=\"panel\" transform=\"translate(" + coord(ox) + ',' + coord(oy) + ")\">\n";
        s += "<rect x=\"" + coord(x0) + "\" y=\"" + coord(y1) + "\" width=\"" + coord(x1 - x0) +
             "\" height=\"" + coord(y0 - y1) + "\" fill=\"none\" stroke=\"#999\"/>\n";

        std::string band;
        for (std::size_t i = 0; i < c.points.size(); ++i)
            band += px(c.points[i].x) + ',' + py(hi[i]) + ' ';
        for (std::size_t i = c.points.size(); i-- > 0;)
            band += px(c.points[i].x) + ',' + py(lo[i]) + ' ';
        band.pop_back();
        s += "<polygon class=\"iqr\" points=\"" + band +
             "\" fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\"/>\n";

        auto line = [&](const std::vector<double>& v) {
            std::string pts;
            for (std::size_t i = 0; i < v.size(); ++i) pts += px(c.points[i].x) + ',' + py(v[i]) + ' ';
            pts.pop_back();
            return pts;
        };
        s += "<polyline class=\"median\" points=\"" + line(med) +
             "\" fill=\"none\" stroke=\"#08519c\" stroke-width=\"2\"/>\n";
        s += "<polyline class=\"smoothed\" points=\"" + line(sm) +
             "\" fill=\"none\" stroke=\"#e6550d\" stroke-width=\"1.5\" stroke-dasharray=\"5,3\"/>\n";
        if (c.points.size() == 1)
            s += "<circle cx=\"" + px(c.points[0].x) + "\" cy=\"" + py(med[0]) +
                 "\" r=\"3\" fill=\"#08519c\"/>\n";

        // ticks: ends of each axis
        s += "<text x=\"" + coord(x0) + "\" y=\"" + coord(y0 + 14) + "\" text-anchor=\"middle\">0</text>\n";
        s += "<text x=\"" + coord(x1) + "\" y=\"" + coord(y0 + 14) + "\" text-anchor=\"middle\">" +
             std::to_string(static_cast<int>(xmax)) + "</text>\n";
        s += "<text x=\"" + coord(x0 - 4) + "\" y=\"" + coord(y0) + "\" text-anchor=\"end\">" +
             xml_escape(num(std::round(ymin * 100) / 100)) + "</text>\n";
        s += "<text x=\"" + coord(x0 - 4) + "\" y=\"" + coord(y1 + 8) + "\" text-anchor=\"end\">" +
             xml_escape(num(std::round(ymax * 100) / 100)) + "</text>\n";
        s += "<text x=\"" + coord((x0 + x1) / 2) + "\" y=\"" + coord(ph - 12) +
             "\" text-anchor=\"middle\">decisions fixed (x)</text>\n";
        s += "<text transform=\"translate(14," + coord((y0 + y1) / 2) +
             ") rotate(-90)\" text-anchor=\"middle\">" + xml_escape(kObjectiveNames[k]) + "</text>\n";
        s += "<text x=\"" + coord(x0) + "\" y=\"" + coord(y1 - 8) + "\" font-weight=\"bold\">" +
             xml_escape(kObjectiveNames[k]) + "</text>\n";
        s += "</g>\n";
    }
    s += "</svg>\n";
    return s;
}

std::string ranking_markdown(const GoalModel& model, const RankResult& r) {
    std::string out = "| rank | decision | polarity | value |\n|---:|---|---|---:|\n";
    int i = 0;
    for (const auto& s : r.ordering) {
        out += "| " + std::to_string(++i) + " | " + model.node(s.decision.node).id + " | " +
               (s.decision.polarity == Label::Denied ? "denied" : "satisfied") + " | " +
               num(std::round(s.value * 1000) / 1000) + " |\n";
    }
    return out;
}

}  // namespace shortkit
