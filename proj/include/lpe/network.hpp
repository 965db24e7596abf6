#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lpe {

using NodeId = std::size_t;

// A directed arc parent -> child.
struct Arc {
  NodeId parent = 0;
  NodeId child = 0;

  friend auto operator<=>(const Arc&, const Arc&) = default;
};

class NetworkError : public std::runtime_error {
 public:
  explicit NetworkError(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public NetworkError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : NetworkError("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline constexpr double kRowSumTolerance = 1e-9;

struct Node {
  std::string name;
  std::vector<std::string> states;
  std::vector<NodeId> parents;
  // Row-major: one row per joint parent configuration (last parent varies
  // fastest), one column per state.
  std::vector<double> cpt;

  std::size_t state_count() const { return states.size(); }
};

// Observed state per node.
using Evidence = std::map<NodeId, std::size_t>;

class BeliefNetwork {
 public:
  BeliefNetwork() = default;
  explicit BeliefNetwork(std::string name) : name_(std::move(name)) {}

  // Building. Nodes must be added before they are referenced as parents.
  NodeId add_node(std::string name, std::vector<std::string> states);
  void set_parents(NodeId node, std::vector<NodeId> parents);
  void set_cpt(NodeId node, std::vector<double> table);

  // Checks acyclicity, CPT shapes, entry ranges and row sums. Throws
  // NetworkError on the first violation.
  void validate() const;

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }
  std::size_t size() const { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const NodeId> parents(NodeId id) const { return nodes_.at(id).parents; }
  std::span<const NodeId> children(NodeId id) const { return children_.at(id); }
  std::size_t state_count(NodeId id) const { return nodes_.at(id).states.size(); }

  std::optional<NodeId> find(std::string_view name) const;
  NodeId id_of(std::string_view name) const;  // throws NetworkError
  std::optional<std::size_t> find_state(NodeId id, std::string_view state) const;

  std::size_t parent_config_count(NodeId id) const;
  std::span<const double> cpt_row(NodeId id, std::size_t config) const;
  double probability(NodeId id, std::size_t config, std::size_t state) const {
    return nodes_[id].cpt[config * nodes_[id].states.size() + state];
  }

  std::vector<Arc> arcs() const;
  std::size_t arc_count() const;

  // Kahn order; throws NetworkError when the parent graph has a cycle.
  std::vector<NodeId> topological_order() const;

  // True iff `ancestor` reaches `node` along directed arcs (a node is its own
  // ancestor).
  bool is_ancestor(NodeId ancestor, NodeId node) const;

 private:
  std::string name_ = "network";
  std::vector<Node> nodes_;
  std::vector<std::vector<NodeId>> children_;
};

// Parses the line-oriented network format:
//   network <name>
//   node <id> states <s1> <s2> ...
//   parents <id> [<p1> <p2> ...]
//   cpt <id>            followed by one row per parent configuration
//   evidence <id> <state>
// `#` starts a comment. Evidence lines, if any, are returned separately.
struct ParsedNetwork {
  BeliefNetwork network;
  Evidence evidence;
};

ParsedNetwork parse_network(std::string_view text);
ParsedNetwork load_network(const std::string& path);

// Inverse of parse_network; reals written with 17 significant digits so the
// round trip is bit-exact.
std::string serialize_network(const BeliefNetwork& net, const Evidence& evidence = {});
void save_network(const std::string& path, const BeliefNetwork& net,
                  const Evidence& evidence = {});

// Parses "ID=STATE" against the network.
std::pair<NodeId, std::size_t> parse_observation(const BeliefNetwork& net,
                                                 std::string_view text);

}  // namespace lpe
