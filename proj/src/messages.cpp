#include "lpe/messages.hpp"

#include <algorithm>

namespace lpe {

Message vacuous_message(MessageKind kind, const Arc& arc, std::size_t states) {
  return Message{kind, arc, ScaledVector{vacuous(states), Interval{1.0}}, true};
}

LocalFactor local_factor(const BeliefNetwork& net, NodeId node,
                         const std::map<NodeId, std::size_t>& clamped_parents) {
  LocalFactor f;
  f.node = node;
  f.states = net.state_count(node);
  const auto parents = net.parents(node);

  // Per parent: the required value, or -1 when free.
  std::vector<std::ptrdiff_t> required(parents.size(), -1);
  std::vector<std::size_t> strides(parents.size());
  std::size_t stride = 1;
  for (std::size_t i = parents.size(); i-- > 0;) {
    strides[i] = stride;
    stride *= net.state_count(parents[i]);
  }
  for (std::size_t i = 0; i < parents.size(); ++i) {
    if (auto it = clamped_parents.find(parents[i]); it != clamped_parents.end()) {
      required[i] = static_cast<std::ptrdiff_t>(it->second);
    } else {
      f.parents.push_back(parents[i]);
      f.parent_states.push_back(net.state_count(parents[i]));
    }
  }

  // Filtering rows keeps the free parents in last-fastest order.
  const std::size_t rows = net.parent_config_count(node);
  for (std::size_t r = 0; r < rows; ++r) {
    bool keep = true;
    for (std::size_t i = 0; i < parents.size() && keep; ++i) {
      if (required[i] < 0) continue;
      const std::size_t s = (r / strides[i]) % net.state_count(parents[i]);
      keep = static_cast<std::ptrdiff_t>(s) == required[i];
    }
    if (!keep) continue;
    const auto row = net.cpt_row(node, r);
    f.table.insert(f.table.end(), row.begin(), row.end());
  }
  return f;
}

IntervalVector joint_product(std::span<const IntervalVector> factors) {
  IntervalVector out{Interval{1.0}};
  for (const auto& factor : factors) {
    IntervalVector next;
    next.reserve(out.size() * factor.size());
    for (const auto& prefix : out) {
      for (const auto& x : factor) next.push_back(prefix * x);
    }
    out = std::move(next);
  }
  return out;
}

namespace {

Interval product_of_scales(std::span<const ScaledVector> msgs, std::size_t skip) {
  Interval s{1.0};
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    if (i != skip) s = s * msgs[i].scale;
  }
  return s;
}

}  // namespace

ScaledVector pi_hat(const LocalFactor& factor, std::span<const ScaledVector> parent_msgs) {
  if (parent_msgs.size() != factor.parents.size()) {
    throw std::invalid_argument("pi_hat: one message per parent required");
  }
  std::vector<IntervalVector> dists;
  dists.reserve(parent_msgs.size());
  for (const auto& m : parent_msgs) dists.push_back(m.dist);
  const IntervalVector weights = joint_product(dists);

  IntervalVector column(factor.rows());
  IntervalVector raw(factor.states);
  for (std::size_t x = 0; x < factor.states; ++x) {
    for (std::size_t r = 0; r < factor.rows(); ++r) column[r] = Interval{factor.at(r, x)};
    raw[x] = ar_dot(column, weights);
  }
  return ScaledVector{normalize(raw), product_of_scales(parent_msgs, parent_msgs.size())};
}

ScaledVector combine(std::size_t states, std::span<const ScaledVector> factors,
                     std::optional<std::size_t> observed) {
  const Interval scales = product_of_scales(factors, factors.size());

  if (observed) {
    Interval mass{1.0};
    for (const auto& f : factors) mass = mass * f.dist.at(*observed);
    if (mass.hi == 0.0) throw ConflictingEvidence("observed state has zero support");
    return ScaledVector{indicator(states, *observed), scales * mass};
  }
  if (factors.empty()) {
    return ScaledVector{IntervalVector(states, Interval{1.0 / static_cast<double>(states)}),
                        Interval{static_cast<double>(states)}};
  }
  if (factors.size() == 1) return ScaledVector{factors[0].dist, scales};

  // Mass of the product: every factor but the last is folded into the first
  // A/R argument, the last (a distribution) is the second.
  IntervalVector head = factors[0].dist;
  for (std::size_t k = 1; k + 1 < factors.size(); ++k) {
    for (std::size_t x = 0; x < states; ++x) head[x] = head[x] * factors[k].dist[x];
  }
  const IntervalVector& last = factors.back().dist;
  const Interval mass = ar_dot(head, last);

  IntervalVector product(states);
  for (std::size_t x = 0; x < states; ++x) product[x] = head[x] * last[x];
  return ScaledVector{normalize(product), scales * mass};
}

ScaledVector lambda_hat(std::size_t states, std::span<const ScaledVector> child_msgs,
                        std::optional<std::size_t> observed) {
  return combine(states, child_msgs, observed);
}

ScaledVector bel_hat(const ScaledVector& pi, const ScaledVector& lambda) {
  const ScaledVector both[2] = {lambda, pi};
  return combine(pi.dist.size(), both);
}

ScaledVector pi_msg(const ScaledVector& pi, std::span<const ScaledVector> other_child_msgs,
                    std::optional<std::size_t> observed) {
  std::vector<ScaledVector> factors(other_child_msgs.begin(), other_child_msgs.end());
  factors.push_back(pi);
  return combine(pi.dist.size(), factors, observed);
}

ScaledVector lambda_msg(const LocalFactor& factor, std::size_t parent_slot,
                        const ScaledVector& lambda, std::span<const ScaledVector> parent_msgs) {
  if (parent_msgs.size() != factor.parents.size() || parent_slot >= factor.parents.size()) {
    throw std::invalid_argument("lambda_msg: one message per parent required");
  }
  const std::size_t np = factor.parents.size();
  const std::size_t target_states = factor.parent_states[parent_slot];

  // Inner sum over the node's own states, once per CPT row.
  std::vector<Interval> inner(factor.rows());
  IntervalVector column(factor.states);
  for (std::size_t r = 0; r < factor.rows(); ++r) {
    for (std::size_t x = 0; x < factor.states; ++x) column[x] = Interval{factor.at(r, x)};
    inner[r] = ar_dot(column, lambda.dist);
  }

  std::vector<IntervalVector> others;
  std::vector<std::size_t> other_slots;
  for (std::size_t i = 0; i < np; ++i) {
    if (i == parent_slot) continue;
    others.push_back(parent_msgs[i].dist);
    other_slots.push_back(i);
  }
  const IntervalVector weights = joint_product(others);

  std::vector<std::size_t> strides(np);
  std::size_t stride = 1;
  for (std::size_t i = np; i-- > 0;) {
    strides[i] = stride;
    stride *= factor.parent_states[i];
  }

  // Outer sum over the other parents' joint configurations.
  IntervalVector raw(target_states);
  IntervalVector coeffs(weights.size());
  for (std::size_t y = 0; y < target_states; ++y) {
    for (std::size_t c = 0; c < weights.size(); ++c) {
      std::size_t row = y * strides[parent_slot];
      std::size_t rest = c;
      for (std::size_t k = other_slots.size(); k-- > 0;) {
        const std::size_t slot = other_slots[k];
        row += (rest % factor.parent_states[slot]) * strides[slot];
        rest /= factor.parent_states[slot];
      }
      coeffs[c] = inner[row];
    }
    raw[y] = ar_dot(coeffs, weights);
  }

  const Interval mass = total(raw);
  Interval scale = lambda.scale * product_of_scales(parent_msgs, parent_slot) * mass;
  return ScaledVector{normalize(raw), scale};
}

}  // namespace lpe
