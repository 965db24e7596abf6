#include "lpe/engine.hpp"

namespace lpe {

const char* to_string(QueryStatus status) {
  switch (status) {
    case QueryStatus::kSatisfied: return "satisfied";
    case QueryStatus::kSaturated: return "saturated";
    case QueryStatus::kBudgetExhausted: return "budget_exhausted";
  }
  return "?";
}

bool criterion_met(const StopCriterion& stop, const IntervalVector& bel,
                   std::optional<bool>* answer) {
  if (const auto* t = std::get_if<TargetWidth>(&stop)) return max_width(bel) <= t->width;
  const auto& th = std::get<Threshold>(stop);
  const Interval& p = bel.at(th.state);
  std::optional<bool> decided;
  if (th.direction == Threshold::Direction::kGreater) {
    if (p.lo > th.probability) decided = true;
    if (p.hi <= th.probability) decided = false;
  } else {
    if (p.hi < th.probability) decided = true;
    if (p.lo >= th.probability) decided = false;
  }
  if (answer) *answer = decided;
  return decided.has_value();
}

QueryResult answer_query(const BeliefNetwork& net, NodeId query, const Evidence& evidence,
                         const Strategy& strategy, const StopCriterion& stop,
                         const Budget& budget, const QueryOptions& options) {
  const auto start = Clock::now();
  Deadline deadline;
  if (budget.time) deadline = start + *budget.time;

  PropagationOptions popts;
  popts.use_cache = options.use_cache;
  popts.max_cutset_instances = options.max_cutset_instances;
  popts.deadline = deadline;
  Propagator propagator(net, make_scope(net, query, evidence), popts);

  QueryResult result;
  result.bel = vacuous(net.state_count(query));
  ActiveSet active(net.size(), query);
  for (;;) {
    if (budget.max_iterations && result.iterations.size() >= *budget.max_iterations) {
      result.status = QueryStatus::kBudgetExhausted;
      break;
    }
    IterationRecord record;
    try {
      record.bel = propagator.run(active);
    } catch (const DeadlineExceeded&) {
      result.status = QueryStatus::kBudgetExhausted;
      break;
    }
    const auto& stats = propagator.last_stats();
    record.active_nodes = active.node_count();
    record.active_arcs = active.arcs().size();
    record.width = max_width(record.bel);
    record.elapsed = Clock::now() - start;
    record.node_visits = stats.node_visits;
    record.conditioned_knots = stats.conditioned_knots;
    record.dropped_arcs = stats.dropped_arcs;
    result.bel = record.bel;
    result.node_visits += stats.node_visits;
    result.iterations.push_back(record);
    if (options.on_iteration) options.on_iteration(record);

    if (criterion_met(stop, result.bel, &result.threshold_answer)) {
      result.status = QueryStatus::kSatisfied;
      break;
    }
    if (deadline && Clock::now() > *deadline) {
      result.status = QueryStatus::kBudgetExhausted;
      break;
    }
    ExpansionResult next = expand(active, strategy, propagator.scope());
    if (next.fixed_point) {
      result.status = QueryStatus::kSaturated;
      break;
    }
    active = std::move(next.active);
  }
  result.elapsed = Clock::now() - start;
  return result;
}

}  // namespace lpe
