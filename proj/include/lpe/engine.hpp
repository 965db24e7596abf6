#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "lpe/deadline.hpp"
#include "lpe/graph.hpp"
#include "lpe/interval.hpp"
#include "lpe/messages.hpp"
#include "lpe/network.hpp"

namespace lpe {

// Structural facts about one query, computed once and shared by every
// iteration.
struct QueryScope {
  NodeId query = 0;
  Evidence evidence;
  // Ancestors of the query and the observed nodes. Everything else is barren:
  // its λ messages are exactly uniform, so its arcs are dropped.
  std::vector<bool> in_scope;
  std::vector<bool> relevant;
  // In-scope neighbors (parents and in-scope children), ascending.
  std::vector<std::vector<NodeId>> neighbors;
  std::vector<std::vector<NodeId>> parents;  // filled for in-scope nodes
  // Knots of the skeleton restricted to the relevant nodes.
  KnotDecomposition knots;
  std::vector<std::ptrdiff_t> knot_of;  // -1 outside every knot

  std::optional<std::size_t> observed(NodeId id) const {
    auto it = evidence.find(id);
    if (it == evidence.end()) return std::nullopt;
    return it->second;
  }
};

QueryScope make_scope(const BeliefNetwork& net, NodeId query, const Evidence& evidence);

// The nodes and arcs over which messages are computed. An arc between two
// member nodes may be absent (a missing arc).
class ActiveSet {
 public:
  ActiveSet(std::size_t node_count, NodeId query);

  NodeId query() const { return query_; }
  bool has_node(NodeId id) const { return member_.at(id); }
  bool has_arc(const Arc& arc) const { return arcs_.count(arc) > 0; }
  // Members in the order they joined.
  const std::vector<NodeId>& nodes() const { return order_; }
  const std::set<Arc>& arcs() const { return arcs_; }
  std::size_t node_count() const { return order_.size(); }
  std::size_t capacity() const { return member_.size(); }

  void add_node(NodeId id);
  // Both endpoints must already be members.
  void add_arc(const Arc& arc);

  // Arcs a strategy has refused or is holding back.
  const std::set<Arc>& excluded_arcs() const { return excluded_; }
  const std::map<Arc, std::size_t>& pending_arcs() const { return pending_; }
  std::size_t round() const { return round_; }

 private:
  friend struct Expander;

  NodeId query_;
  std::vector<bool> member_;
  std::vector<NodeId> order_;
  std::set<Arc> arcs_;
  std::vector<NodeId> frontier_;
  std::set<Arc> excluded_;
  std::map<Arc, std::size_t> pending_;  // arc -> round at which it is released
  std::size_t round_ = 0;
};

struct Strategy {
  enum class Kind { kBreadthFirst, kNoLoops, kDelayedLoops };
  Kind kind = Kind::kBreadthFirst;
  std::size_t delay = 5;  // rounds, for kDelayedLoops

  static Strategy breadth_first() { return {Kind::kBreadthFirst, 0}; }
  static Strategy no_loops() { return {Kind::kNoLoops, 0}; }
  static Strategy delayed_loops(std::size_t rounds = 5) { return {Kind::kDelayedLoops, rounds}; }
};

const char* to_string(Strategy::Kind kind);

struct ExpansionResult {
  ActiveSet active;
  bool fixed_point = false;  // nothing could be added
};

/// One breadth-first round: every relevant in-scope neighbor of the nodes
/// added in the previous round joins, with its connecting arcs. Arcs are
/// considered in discovery order; under no_loops an arc that would close an
/// undirected cycle is excluded for good, under delayed_loops it is held back
/// for `delay` rounds.
ExpansionResult expand(const ActiveSet& active, const Strategy& strategy,
                       const QueryScope& scope);
ExpansionResult expand(const ActiveSet& active, const Strategy& strategy,
                       const BeliefNetwork& net, NodeId query, const Evidence& evidence);

// Messages keyed by direction and computation mode, with the inputs they
// were computed from so an iteration can reuse a message whose inputs did
// not change.
class MessageCache {
 public:
  struct Key {
    NodeId from = 0;
    NodeId to = 0;
    std::ptrdiff_t mode = -1;  // -1 polytree formula, otherwise knot index
    friend auto operator<=>(const Key&, const Key&) = default;
  };

  // Stores the message; returns false iff a bit-identical value was already
  // cached under the same key.
  bool update(const Key& key, const Message& message,
              std::vector<IntervalVector> inputs = {});
  const Message* find(const Key& key) const;
  // The cached message if its recorded inputs are bit-identical to `inputs`.
  const Message* reusable(const Key& key, const std::vector<IntervalVector>& inputs) const;

  std::size_t size() const { return entries_.size(); }
  void clear() { entries_.clear(); }

 private:
  struct Entry {
    Message message;
    std::vector<IntervalVector> inputs;
  };
  std::map<Key, Entry> entries_;
};

struct PropagationOptions {
  bool use_cache = true;
  // When false, active sets whose arcs contain a cycle are rejected instead
  // of conditioning whole knots.
  bool condition_knots = true;
  std::size_t max_cutset_instances = std::size_t{1} << 16;
  Deadline deadline;
};

struct PropagationStats {
  std::size_t node_visits = 0;  // message computations actually performed
  std::size_t cache_hits = 0;
  std::size_t conditioned_knots = 0;
  std::size_t dropped_arcs = 0;  // active arcs treated as missing to break partial-knot cycles
};

/// One-pass interval propagation toward the query over an active set. Knots
/// wholly inside the active set are evaluated by interval cutset
/// conditioning; any other cycle among active arcs is broken by treating its
/// last breadth-first arc as missing. Every arc outside the propagation
/// graph contributes a vacuous message.
class Propagator {
 public:
  Propagator(const BeliefNetwork& net, QueryScope scope, PropagationOptions options = {});

  IntervalVector run(const ActiveSet& active);

  const QueryScope& scope() const { return scope_; }
  const PropagationStats& last_stats() const { return stats_; }
  MessageCache& cache() { return cache_; }
  void set_deadline(Deadline deadline) { options_.deadline = deadline; }

 private:
  struct Inputs {
    std::vector<ScaledVector> parents;   // one per network parent
    std::vector<ScaledVector> children;  // in-scope children other than the excluded one
    std::vector<IntervalVector> signature;
  };

  void plan(const ActiveSet& active);
  bool used(NodeId a, NodeId b) const;
  Inputs gather(NodeId node, std::optional<NodeId> exclude);
  ScaledVector message(NodeId from, NodeId to);
  ScaledVector tree_message(NodeId from, NodeId to);
  ScaledVector knot_output(std::size_t knot, NodeId target, std::optional<NodeId> peer);

  const BeliefNetwork& net_;
  QueryScope scope_;
  PropagationOptions options_;
  MessageCache cache_;
  PropagationStats stats_;
  std::vector<std::vector<NodeId>> cutsets_;  // per knot, computed lazily
  std::vector<bool> cutset_ready_;

  // Per run.
  std::set<Arc> used_;
  std::vector<std::ptrdiff_t> whole_knot_of_;
};

/// Interval bounds on the query's posterior for one active set, polytree
/// propagation only. Throws std::invalid_argument when the active arcs
/// contain a cycle.
IntervalVector propagate(const BeliefNetwork& net, const ActiveSet& active,
                         const Evidence& evidence, NodeId query);

struct TargetWidth {
  double width = 0.0;
};

struct Threshold {
  enum class Direction { kGreater, kLess };
  std::size_t state = 0;
  Direction direction = Direction::kGreater;
  double probability = 0.5;
};

using StopCriterion = std::variant<TargetWidth, Threshold>;

// Whether `bel` meets the criterion. For a threshold the answer (P > p or
// P < p) is written to `answer` once it is decided.
bool criterion_met(const StopCriterion& stop, const IntervalVector& bel,
                   std::optional<bool>* answer = nullptr);

struct Budget {
  std::optional<std::chrono::milliseconds> time;
  std::optional<std::size_t> max_iterations;
};

enum class QueryStatus { kSatisfied, kSaturated, kBudgetExhausted };
const char* to_string(QueryStatus status);

struct IterationRecord {
  IntervalVector bel;
  std::size_t active_nodes = 0;
  std::size_t active_arcs = 0;
  double width = 0.0;  // max over states of hi - lo
  std::chrono::nanoseconds elapsed{0};
  std::size_t node_visits = 0;
  std::size_t conditioned_knots = 0;
  std::size_t dropped_arcs = 0;
};

struct QueryResult {
  IntervalVector bel;
  QueryStatus status = QueryStatus::kSaturated;
  std::optional<bool> threshold_answer;
  std::vector<IterationRecord> iterations;
  std::size_t node_visits = 0;
  std::chrono::nanoseconds elapsed{0};

  double width() const { return max_width(bel); }
};

struct QueryOptions {
  bool use_cache = true;
  std::size_t max_cutset_instances = std::size_t{1} << 16;
  // Checked after every iteration; the bounds of each iteration are passed
  // to it as they are produced.
  std::function<void(const IterationRecord&)> on_iteration;
};

/// The anytime loop: starting from {query}, propagate, test the stop
/// criterion, and expand until the criterion holds, the active set reaches
/// a fixed point (kSaturated), or the budget runs out (kBudgetExhausted).
QueryResult answer_query(const BeliefNetwork& net, NodeId query, const Evidence& evidence,
                         const Strategy& strategy, const StopCriterion& stop,
                         const Budget& budget = {}, const QueryOptions& options = {});

}  // namespace lpe
