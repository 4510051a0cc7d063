#include "shortkit/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "shortkit/rng.hpp"

namespace shortkit {

namespace {

constexpr std::string_view kLabelNames[] = {"denied", "partially-denied", "undefined",
                                            "partially-satisfied", "satisfied"};

}  // namespace

std::string_view to_string(Label l) { return kLabelNames[static_cast<int>(l) + 2]; }

std::string_view to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::Makes: return "makes";
        case EdgeKind::Helps: return "helps";
        case EdgeKind::Hurts: return "hurts";
        case EdgeKind::Breaks: return "breaks";
    }
    return "?";
}

std::optional<EdgeKind> edge_kind_from(std::string_view s) {
    if (s == "makes") return EdgeKind::Makes;
    if (s == "helps") return EdgeKind::Helps;
    if (s == "hurts") return EdgeKind::Hurts;
    if (s == "breaks") return EdgeKind::Breaks;
    return std::nullopt;
}

std::string_view to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Leaf: return "leaf";
        case NodeKind::And: return "and";
        case NodeKind::Or: return "or";
        case NodeKind::Softgoal: return "softgoal";
        case NodeKind::Hardgoal: return "hardgoal";
    }
    return "?";
}

std::optional<NodeKind> node_kind_from(std::string_view s) {
    if (s == "leaf") return NodeKind::Leaf;
    if (s == "and") return NodeKind::And;
    if (s == "or") return NodeKind::Or;
    if (s == "softgoal") return NodeKind::Softgoal;
    if (s == "hardgoal") return NodeKind::Hardgoal;
    return std::nullopt;
}

double Triangular::quantile(double u) const {
    if (high <= low) return low;
    const double span = high - low;
    const double cut = (mode - low) / span;
    if (u < cut) return low + std::sqrt(u * span * (mode - low));
    return high - std::sqrt((1.0 - u) * span * (high - mode));
}

const Triangular& CostSpec::for_node(const std::string& id) const {
    auto it = overrides.find(id);
    return it == overrides.end() ? distribution : it->second;
}

ParseError::ParseError(const std::string& what, int line, int column)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " +
                                        std::to_string(column) + ": " + what
                                  : what),
      line_(line),
      column_(column) {}

GoalModel::GoalModel(std::vector<Node> nodes, std::vector<Edge> edges,
                     std::vector<NodeIndex> roots, CostSpec costs)
    : nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      roots_(std::move(roots)),
      costs_(std::move(costs)) {
    const auto n = nodes_.size();
    for (NodeIndex i = 0; i < n; ++i) by_id_.emplace(nodes_[i].id, i);

    // Incident lists: outgoing block then incoming block per node.
    std::vector<std::uint32_t> in_count(n, 0);
    out_count_.assign(n, 0);
    for (const auto& e : edges_) {
        if (e.parent < n) ++out_count_[e.parent];
        if (e.child < n) ++in_count[e.child];
    }
    inc_offset_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i)
        inc_offset_[i + 1] = inc_offset_[i] + out_count_[i] + in_count[i];
    incident_.assign(inc_offset_[n], 0);
    std::vector<std::uint32_t> out_fill(n, 0), in_fill(n, 0);
    for (EdgeIndex e = 0; e < edges_.size(); ++e) {
        const auto& ed = edges_[e];
        if (ed.parent < n) incident_[inc_offset_[ed.parent] + out_fill[ed.parent]++] = e;
        if (ed.child < n)
            incident_[inc_offset_[ed.child] + out_count_[ed.child] + in_fill[ed.child]++] = e;
    }

    leaf_slot_.assign(n, -1);
    for (NodeIndex i = 0; i < n; ++i)
        if (out_count_[i] == 0) leaves_.push_back(i);
    std::sort(leaves_.begin(), leaves_.end(),
              [&](NodeIndex a, NodeIndex b) { return nodes_[a].id < nodes_[b].id; });
    for (std::size_t s = 0; s < leaves_.size(); ++s) leaf_slot_[leaves_[s]] = static_cast<int>(s);

    is_root_.assign(n, 0);
    for (auto r : roots_)
        if (r < n) is_root_[r] = 1;
}

std::optional<NodeIndex> GoalModel::find(std::string_view id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

NodeIndex GoalModel::index_of(std::string_view id) const {
    if (auto i = find(id)) return *i;
    throw ModelError("unknown node " + std::string(id));
}

std::span<const EdgeIndex> GoalModel::incident(NodeIndex i) const {
    return {incident_.data() + inc_offset_[i], inc_offset_[i + 1] - inc_offset_[i]};
}

std::span<const EdgeIndex> GoalModel::out_edges(NodeIndex i) const {
    return {incident_.data() + inc_offset_[i], out_count_[i]};
}

std::span<const EdgeIndex> GoalModel::in_edges(NodeIndex i) const {
    return {incident_.data() + inc_offset_[i] + out_count_[i],
            inc_offset_[i + 1] - inc_offset_[i] - out_count_[i]};
}

std::vector<NodeIndex> GoalModel::hardgoals() const {
    std::vector<NodeIndex> out;
    for (NodeIndex i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].kind == NodeKind::Hardgoal) out.push_back(i);
    return out;
}

std::vector<NodeIndex> GoalModel::softgoals() const {
    std::vector<NodeIndex> out;
    for (NodeIndex i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].kind == NodeKind::Softgoal) out.push_back(i);
    return out;
}

bool GoalModel::operator==(const GoalModel& o) const {
    if (nodes_.size() != o.nodes_.size() || edges_.size() != o.edges_.size()) return false;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& a = nodes_[i];
        const auto& b = o.nodes_[i];
        if (a.id != b.id || a.name != b.name || a.kind != b.kind) return false;
    }
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto& a = edges_[e];
        const auto& b = o.edges_[e];
        if (a.parent != b.parent || a.child != b.child || a.kind != b.kind) return false;
    }
    auto ra = roots_, rb = o.roots_;
    std::sort(ra.begin(), ra.end());
    std::sort(rb.begin(), rb.end());
    return ra == rb && costs_ == o.costs_;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

struct Token {
    std::string text;
    int column;
    bool quoted;
};

std::vector<Token> tokenize(std::string_view line, int line_no) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (c == '#') break;
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        const int col = static_cast<int>(i) + 1;
        if (c == '"') {
            std::string s;
            ++i;
            bool closed = false;
            while (i < line.size()) {
                if (line[i] == '\\' && i + 1 < line.size()) {
                    s.push_back(line[i + 1]);
                    i += 2;
                    continue;
                }
                if (line[i] == '"') {
                    closed = true;
                    ++i;
                    break;
                }
                s.push_back(line[i++]);
            }
            if (!closed) throw ParseError("unterminated string", line_no, col);
            out.push_back({std::move(s), col, true});
            continue;
        }
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r' &&
               line[j] != '#')
            ++j;
        out.push_back({std::string(line.substr(i, j - i)), col, false});
        i = j;
    }
    return out;
}

double parse_number(const Token& t, int line_no) {
    try {
        std::size_t used = 0;
        double v = std::stod(t.text, &used);
        if (used != t.text.size() || !std::isfinite(v)) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + t.text + "'", line_no, t.column);
    }
}

struct RawModel {
    std::vector<Node> nodes;
    std::vector<std::pair<std::string, std::string>> edge_ends;
    std::vector<EdgeKind> edge_kinds;
    std::vector<std::string> roots;
    CostSpec costs;
};

GoalModel assemble(RawModel raw, bool check) {
    std::map<std::string, NodeIndex, std::less<>> ids;
    for (NodeIndex i = 0; i < raw.nodes.size(); ++i) {
        if (!ids.emplace(raw.nodes[i].id, i).second && check)
            throw ModelError("duplicate id " + raw.nodes[i].id);
    }
    auto lookup = [&](const std::string& id) -> NodeIndex {
        auto it = ids.find(id);
        if (it == ids.end()) {
            if (check) throw ModelError("unknown node " + id);
            return static_cast<NodeIndex>(-1);
        }
        return it->second;
    };
    std::vector<Edge> edges;
    for (std::size_t e = 0; e < raw.edge_ends.size(); ++e) {
        auto p = lookup(raw.edge_ends[e].first);
        auto c = lookup(raw.edge_ends[e].second);
        edges.push_back({p, c, raw.edge_kinds[e]});
    }
    std::vector<NodeIndex> roots;
    for (const auto& r : raw.roots) roots.push_back(lookup(r));
    for (const auto& [id, tri] : raw.costs.overrides)
        if (check && !ids.contains(id)) throw ModelError("cost for unknown node " + id);

    // Unknown endpoints are kept out of the adjacency but reported by validate().
    GoalModel model(std::move(raw.nodes), std::move(edges), std::move(roots),
                    std::move(raw.costs));
    if (check) {
        auto violations = validate(model);
        if (!violations.empty())
            throw ModelError(violations.front().rule + ": " + violations.front().subject);
    }
    return model;
}

RawModel parse_text(std::string_view text) {
    RawModel raw;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        ++line_no;
        pos = end + 1;
        auto toks = tokenize(line, line_no);
        if (toks.empty()) {
            if (end == text.size()) break;
            continue;
        }
        const auto& head = toks[0];
        if (head.text == "node") {
            if (toks.size() < 3)
                throw ParseError("node needs <id> <kind>", line_no, head.column);
            Node node;
            node.id = toks[1].text;
            auto kind = node_kind_from(toks[2].text);
            if (!kind) throw ParseError("unknown node kind '" + toks[2].text + "'", line_no,
                                        toks[2].column);
            node.kind = *kind;
            bool root = false;
            for (std::size_t t = 3; t < toks.size(); ++t) {
                if (toks[t].quoted) {
                    node.name = toks[t].text;
                } else if (toks[t].text == "root") {
                    root = true;
                } else {
                    throw ParseError("unexpected '" + toks[t].text + "'", line_no,
                                     toks[t].column);
                }
            }
            if (node.name.empty()) node.name = node.id;
            if (root) raw.roots.push_back(node.id);
            raw.nodes.push_back(std::move(node));
        } else if (head.text == "edge") {
            if (toks.size() != 4)
                throw ParseError("edge needs <parent> <child> <kind>", line_no, head.column);
            auto kind = edge_kind_from(toks[3].text);
            if (!kind) throw ParseError("unknown edge kind '" + toks[3].text + "'", line_no,
                                        toks[3].column);
            raw.edge_ends.emplace_back(toks[1].text, toks[2].text);
            raw.edge_kinds.push_back(*kind);
        } else if (head.text == "cost") {
            if (toks.size() != 5)
                throw ParseError("cost needs <id> <low> <mode> <high>", line_no, head.column);
            Triangular tri{parse_number(toks[2], line_no), parse_number(toks[3], line_no),
                           parse_number(toks[4], line_no)};
            if (!tri.valid())
                throw ParseError("cost requires 0 <= low <= mode <= high", line_no,
                                 toks[2].column);
            if (toks[1].text == "*")
                raw.costs.distribution = tri;
            else
                raw.costs.overrides[toks[1].text] = tri;
        } else {
            throw ParseError("unknown statement '" + head.text + "'", line_no, head.column);
        }
        if (end == text.size()) break;
    }
    return raw;
}

RawModel parse_json_raw(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what(), 0, 0);
    }
    RawModel raw;
    try {
        for (const auto& n : j.at("nodes")) {
            Node node;
            node.id = n.at("id").get<std::string>();
            node.name = n.value("name", node.id);
            auto kind = node_kind_from(n.at("kind").get<std::string>());
            if (!kind) throw ParseError("unknown node kind in node " + node.id, 0, 0);
            node.kind = *kind;
            if (n.value("root", false)) raw.roots.push_back(node.id);
            raw.nodes.push_back(std::move(node));
        }
        for (const auto& e : j.at("edges")) {
            auto kind = edge_kind_from(e.at("kind").get<std::string>());
            if (!kind) throw ParseError("unknown edge kind", 0, 0);
            raw.edge_ends.emplace_back(e.at("parent-id").get<std::string>(),
                                       e.at("child-id").get<std::string>());
            raw.edge_kinds.push_back(*kind);
        }
        if (j.contains("roots")) {
            for (const auto& r : j.at("roots")) {
                auto id = r.get<std::string>();
                if (std::find(raw.roots.begin(), raw.roots.end(), id) == raw.roots.end())
                    raw.roots.push_back(id);
            }
        }
        if (j.contains("costs")) {
            for (const auto& c : j.at("costs")) {
                Triangular tri{c.at("low").get<double>(), c.at("mode").get<double>(),
                               c.at("high").get<double>()};
                if (!tri.valid()) throw ParseError("cost requires 0 <= low <= mode <= high", 0, 0);
                auto id = c.at("id").get<std::string>();
                if (id == "*")
                    raw.costs.distribution = tri;
                else
                    raw.costs.overrides[id] = tri;
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(e.what(), 0, 0);
    }
    return raw;
}

std::string fmt_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

GoalModel parse_model(std::string_view text) { return assemble(parse_text(text), true); }
GoalModel parse_model_unchecked(std::string_view text) { return assemble(parse_text(text), false); }
GoalModel parse_model_json(std::string_view text) { return assemble(parse_json_raw(text), true); }
GoalModel parse_model_json_unchecked(std::string_view text) {
    return assemble(parse_json_raw(text), false);
}

GoalModel parse_model_any(std::string_view text, bool check) {
    auto first = text.find_first_not_of(" \t\r\n");
    const bool json = first != std::string_view::npos && text[first] == '{';
    if (json) return check ? parse_model_json(text) : parse_model_json_unchecked(text);
    return check ? parse_model(text) : parse_model_unchecked(text);
}

GoalModel load_model_file(const std::string& path, bool check) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model_any(ss.str(), check);
}

std::string render_text(const GoalModel& model) {
    std::ostringstream os;
    const auto& spec = model.cost_spec();
    if (!(spec.distribution == Triangular{}))
        os << "cost * " << fmt_number(spec.distribution.low) << ' '
           << fmt_number(spec.distribution.mode) << ' ' << fmt_number(spec.distribution.high)
           << '\n';
    for (NodeIndex i = 0; i < model.node_count(); ++i) {
        const auto& n = model.node(i);
        os << "node " << n.id << ' ' << to_string(n.kind);
        if (model.is_root(i)) os << " root";
        if (n.name != n.id) {
            os << " \"";
            for (char c : n.name) {
                if (c == '"' || c == '\\') os << '\\';
                os << c;
            }
            os << '"';
        }
        os << '\n';
    }
    for (const auto& e : model.edges())
        os << "edge " << model.node(e.parent).id << ' ' << model.node(e.child).id << ' '
           << to_string(e.kind) << '\n';
    for (const auto& [id, tri] : spec.overrides)
        os << "cost " << id << ' ' << fmt_number(tri.low) << ' ' << fmt_number(tri.mode) << ' '
           << fmt_number(tri.high) << '\n';
    return os.str();
}

std::string render_json(const GoalModel& model) {
    nlohmann::ordered_json j;
    j["nodes"] = nlohmann::ordered_json::array();
    for (NodeIndex i = 0; i < model.node_count(); ++i) {
        const auto& n = model.node(i);
        j["nodes"].push_back({{"id", n.id}, {"name", n.name}, {"kind", to_string(n.kind)}});
    }
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : model.edges())
        j["edges"].push_back({{"parent-id", model.node(e.parent).id},
                              {"child-id", model.node(e.child).id},
                              {"kind", to_string(e.kind)}});
    j["roots"] = nlohmann::ordered_json::array();
    for (auto r : model.roots()) j["roots"].push_back(model.node(r).id);
    j["softgoal-ids"] = nlohmann::ordered_json::array();
    for (auto s : model.softgoals()) j["softgoal-ids"].push_back(model.node(s).id);
    const auto& spec = model.cost_spec();
    j["costs"] = nlohmann::ordered_json::array();
    if (!(spec.distribution == Triangular{}))
        j["costs"].push_back({{"id", "*"},
                              {"low", spec.distribution.low},
                              {"mode", spec.distribution.mode},
                              {"high", spec.distribution.high}});
    for (const auto& [id, tri] : spec.overrides)
        j["costs"].push_back({{"id", id}, {"low", tri.low}, {"mode", tri.mode}, {"high", tri.high}});
    return j.dump(2);
}

std::vector<Violation> validate(const GoalModel& model) {
    std::vector<Violation> out;
    const auto n = model.node_count();
    std::map<std::string, int> seen;
    for (const auto& node : model.nodes())
        if (++seen[node.id] == 2) out.push_back({node.id, "duplicate id"});

    bool dangling = false;
    for (const auto& e : model.edges()) {
        if (e.parent >= n || e.child >= n) {
            out.push_back({"edge", "unknown node"});
            dangling = true;
        }
    }
    for (auto r : model.roots())
        if (r >= n) out.push_back({"root", "unknown node"});

    std::vector<int> children(n, 0), parents(n, 0);
    for (const auto& e : model.edges()) {
        if (e.parent >= n || e.child >= n) continue;
        ++children[e.parent];
        ++parents[e.child];
        if (e.parent == e.child) out.push_back({model.node(e.parent).id, "cycle"});
    }
    for (NodeIndex i = 0; i < n; ++i) {
        const auto& node = model.node(i);
        if (node.kind == NodeKind::Leaf && children[i] > 0)
            out.push_back({node.id, "LEAF node has children"});
        if (node.kind == NodeKind::And && children[i] == 0)
            out.push_back({node.id, "AND node requires children"});
        if (node.kind == NodeKind::Or && children[i] == 0)
            out.push_back({node.id, "OR node requires children"});
    }
    for (auto r : model.roots())
        if (r < n && parents[r] > 0) out.push_back({model.node(r).id, "root has incoming edge"});

    // Kahn's algorithm; anything left over sits on or below a cycle.
    if (!dangling) {
        std::vector<int> indeg(n, 0);
        for (const auto& e : model.edges())
            if (e.parent != e.child) ++indeg[e.child];
        std::vector<NodeIndex> queue;
        for (NodeIndex i = 0; i < n; ++i)
            if (indeg[i] == 0) queue.push_back(i);
        std::size_t done = 0;
        while (!queue.empty()) {
            auto v = queue.back();
            queue.pop_back();
            ++done;
            for (auto e : model.out_edges(v)) {
                const auto& ed = model.edge(e);
                if (ed.parent == ed.child) continue;
                if (--indeg[ed.child] == 0) queue.push_back(ed.child);
            }
        }
        if (done < n) {
            for (NodeIndex i = 0; i < n; ++i) {
                if (indeg[i] > 0) {
                    out.push_back({model.node(i).id, "cycle"});
                    break;
                }
            }
        }
    }

    const auto& spec = model.cost_spec();
    if (!spec.distribution.valid()) out.push_back({"*", "invalid cost distribution"});
    for (const auto& [id, tri] : spec.overrides) {
        if (!model.find(id)) out.push_back({id, "cost for unknown node"});
        if (!tri.valid()) out.push_back({id, "invalid cost distribution"});
    }
    return out;
}

CostAssignment sample_costs(const GoalModel& model, const CostSpec& spec, std::uint64_t seed) {
    CostAssignment out;
    out.seed = seed;
    out.by_index.assign(model.node_count(), 0.0);
    // One independent stream per leaf, keyed by its position, so that adding an
    // override for one leaf leaves the others unchanged.
    for (auto leaf : model.leaves()) {
        const auto& id = model.node(leaf).id;
        Rng rng(derive_seed(seed, {0xC057, static_cast<std::uint64_t>(model.leaf_slot(leaf))}));
        double c = spec.for_node(id).quantile(rng.uniform());
        out.cost[id] = c;
        out.by_index[leaf] = c;
    }
    return out;
}

std::vector<std::string> leaves(const GoalModel& model) {
    std::vector<std::string> out;
    for (auto i : model.leaves()) out.push_back(model.node(i).id);
    return out;
}

}  // namespace shortkit
