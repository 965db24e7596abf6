#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "lpe/interval.hpp"
#include "lpe/network.hpp"

namespace lpe {

enum class MessageKind { kPi, kLambda };

// A message or local quantity held as a normalized interval vector `dist`
// plus an interval `scale`: the unnormalized value is scale * dist. Polytree
// propagation only reads `dist`; cutset conditioning also needs the scale to
// weigh cutset instances against each other.
struct ScaledVector {
  IntervalVector dist;
  Interval scale{1.0};
};

// A π message over arc p -> c is a vector over the states of p, and so is a
// λ message over the same arc (it travels c -> p).
struct Message {
  MessageKind kind = MessageKind::kPi;
  Arc arc;
  ScaledVector value;
  bool vacuous = false;
};

Message vacuous_message(MessageKind kind, const Arc& arc, std::size_t states);

// A node's CPT as seen by the local computations. Parents whose value is
// clamped (cutset or evidence splitting) are folded into the table and no
// longer appear as parents.
struct LocalFactor {
  NodeId node = 0;
  std::size_t states = 0;
  std::vector<NodeId> parents;
  std::vector<std::size_t> parent_states;
  std::vector<double> table;  // rows: joint parent configurations, last parent fastest

  std::size_t rows() const { return states ? table.size() / states : 0; }
  double at(std::size_t row, std::size_t state) const { return table[row * states + state]; }
};

LocalFactor local_factor(const BeliefNetwork& net, NodeId node,
                         const std::map<NodeId, std::size_t>& clamped_parents = {});

// Entrywise product over the joint configurations of the given vectors (last
// vector varies fastest). The product of coherent vectors over disjoint
// variables is coherent. No factors yields the single configuration [1, 1].
IntervalVector joint_product(std::span<const IntervalVector> factors);

/// π̂(x) = A/R_u(P(x|u), Π_i π̂_X(u_i)), normalized. `parent_msgs` holds one
/// entry per parent of `factor`, in parent order.
ScaledVector pi_hat(const LocalFactor& factor, std::span<const ScaledVector> parent_msgs);

// Entrywise product of the given vectors, optionally multiplied by the
// indicator of an observed state, then normalized. With no factors and no
// observation the product is the all-ones vector.
ScaledVector combine(std::size_t states, std::span<const ScaledVector> factors,
                     std::optional<std::size_t> observed = std::nullopt);

// λ̂(x) = Π_j λ̂_{Y_j}(x), with the evidence indicator when observed.
ScaledVector lambda_hat(std::size_t states, std::span<const ScaledVector> child_msgs,
                        std::optional<std::size_t> observed = std::nullopt);

// BEL̂(x) = λ̂(x) π̂(x), normalized.
ScaledVector bel_hat(const ScaledVector& pi, const ScaledVector& lambda);

// π̂_{Y_j}(x) = π̂(x) Π_{k≠j} λ̂_{Y_k}(x), with the evidence indicator.
ScaledVector pi_msg(const ScaledVector& pi, std::span<const ScaledVector> other_child_msgs,
                    std::optional<std::size_t> observed = std::nullopt);

/// λ̂_X(y) = A/R_{u\y}( A/R_k(P(x_k|u,y), λ̂(x_k)), Π_i π̂_X(u_i) ), normalized.
/// `parent_msgs` holds one entry per parent of `factor`; the entry at
/// `parent_slot` (the receiving parent) is ignored.
ScaledVector lambda_msg(const LocalFactor& factor, std::size_t parent_slot,
                        const ScaledVector& lambda, std::span<const ScaledVector> parent_msgs);

}  // namespace lpe
