// Goal-model core types: labels, edge/node kinds, the model graph, and
// triangular leaf costs.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shortkit {

// Labels are stored in half units so that +-1/2 stays integral.
enum class Label : std::int8_t {
    Denied = -2,
    PartialDen = -1,
    Undefined = 0,
    PartialSat = 1,
    Satisfied = 2,
};

inline constexpr double label_value(Label l) { return static_cast<int>(l) / 2.0; }
inline constexpr bool is_full(Label l) { return l == Label::Satisfied || l == Label::Denied; }
std::string_view to_string(Label l);

enum class EdgeKind : std::int8_t { Makes = 2, Helps = 1, Hurts = -1, Breaks = -2 };

inline constexpr double edge_weight(EdgeKind k) { return static_cast<int>(k) / 2.0; }
std::string_view to_string(EdgeKind k);
std::optional<EdgeKind> edge_kind_from(std::string_view s);

enum class NodeKind : std::uint8_t { Leaf, And, Or, Softgoal, Hardgoal };

std::string_view to_string(NodeKind k);
std::optional<NodeKind> node_kind_from(std::string_view s);

using NodeIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;

struct Node {
    std::string id;
    std::string name;
    NodeKind kind = NodeKind::Leaf;
};

struct Edge {
    NodeIndex parent = 0;
    NodeIndex child = 0;
    EdgeKind kind = EdgeKind::Makes;
};

struct Triangular {
    double low = 1.0;
    double mode = 5.0;
    double high = 10.0;

    bool valid() const { return low >= 0.0 && low <= mode && mode <= high; }
    double mean() const { return (low + mode + high) / 3.0; }
    // Inverse CDF; u in [0,1).
    double quantile(double u) const;
    bool operator==(const Triangular&) const = default;
};

struct CostSpec {
    Triangular distribution;
    std::map<std::string, Triangular> overrides;

    const Triangular& for_node(const std::string& id) const;
    bool operator==(const CostSpec&) const = default;
};

// Thrown for malformed text/JSON. line/column are 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line, int column);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// Thrown when a model violates a structural invariant.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Violation {
    std::string subject;  // node id or "parent->child"
    std::string rule;
};

// Immutable after construction; adjacency is precomputed for the propagation
// kernels.
class GoalModel {
public:
    GoalModel() = default;
    // Does not validate; call validate() or use parse_model().
    GoalModel(std::vector<Node> nodes, std::vector<Edge> edges, std::vector<NodeIndex> roots,
              CostSpec costs = {});

    std::span<const Node> nodes() const { return nodes_; }
    std::span<const Edge> edges() const { return edges_; }
    std::span<const NodeIndex> roots() const { return roots_; }
    const CostSpec& cost_spec() const { return costs_; }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const Node& node(NodeIndex i) const { return nodes_[i]; }
    const Edge& edge(EdgeIndex e) const { return edges_[e]; }
    NodeKind kind(NodeIndex i) const { return nodes_[i].kind; }

    std::optional<NodeIndex> find(std::string_view id) const;
    NodeIndex index_of(std::string_view id) const;  // throws ModelError

    // Edges touching a node, outgoing first then incoming, in file order.
    std::span<const EdgeIndex> incident(NodeIndex i) const;
    std::span<const EdgeIndex> out_edges(NodeIndex i) const;
    std::span<const EdgeIndex> in_edges(NodeIndex i) const;

    // Decision variables: nodes with no children, ordered by id.
    std::span<const NodeIndex> leaves() const { return leaves_; }
    // Position of a node in leaves(), or -1.
    int leaf_slot(NodeIndex i) const { return leaf_slot_[i]; }

    std::vector<NodeIndex> hardgoals() const;
    std::vector<NodeIndex> softgoals() const;
    bool is_root(NodeIndex i) const { return is_root_[i] != 0; }

    bool operator==(const GoalModel& o) const;

private:
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::vector<NodeIndex> roots_;
    CostSpec costs_;

    std::map<std::string, NodeIndex, std::less<>> by_id_;
    std::vector<std::uint32_t> inc_offset_;
    std::vector<EdgeIndex> incident_;
    std::vector<std::uint32_t> out_count_;
    std::vector<NodeIndex> leaves_;
    std::vector<int> leaf_slot_;
    std::vector<std::uint8_t> is_root_;
};

struct CostAssignment {
    std::map<std::string, double> cost;  // one entry per leaf
    std::uint64_t seed = 0;
    // Indexed by NodeIndex; zero for non-leaves.
    std::vector<double> by_index;

    double of(NodeIndex i) const { return by_index[i]; }
};

// Line format: node/edge/cost statements, '#' comments.
GoalModel parse_model(std::string_view text);
// Same, but returns the model even when it violates invariants.
GoalModel parse_model_unchecked(std::string_view text);
GoalModel parse_model_json(std::string_view json_text);
GoalModel parse_model_json_unchecked(std::string_view json_text);
// Picks the JSON or line parser from the first non-blank character.
GoalModel parse_model_any(std::string_view text, bool check = true);
GoalModel load_model_file(const std::string& path, bool check = true);

std::string render_text(const GoalModel& model);
std::string render_json(const GoalModel& model);

std::vector<Violation> validate(const GoalModel& model);

CostAssignment sample_costs(const GoalModel& model, const CostSpec& spec, std::uint64_t seed);
inline CostAssignment sample_costs(const GoalModel& model, std::uint64_t seed) {
    return sample_costs(model, model.cost_spec(), seed);
}

std::vector<std::string> leaves(const GoalModel& model);

}  // namespace shortkit
