#pragma once

#include <cstdint>
#include <vector>

#include "lpe/network.hpp"

namespace lpe {

inline constexpr std::uint64_t kMaxEnumerationStates = std::uint64_t{1} << 24;

class StateSpaceOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact posterior marginals of every node by summing the full joint over all
// configurations consistent with the evidence. Throws StateSpaceOverflow when
// the product of unobserved state counts exceeds kMaxEnumerationStates and
// ConflictingEvidence when the evidence has probability zero.
std::vector<std::vector<double>> enumerate_marginals(const BeliefNetwork& net,
                                                     const Evidence& evidence);
std::vector<double> enumerate_marginal(const BeliefNetwork& net, const Evidence& evidence,
                                       NodeId node);

// Exact posterior marginals on a polytree with two-pass point-valued message
// passing (collect toward a root, then distribute). Rejects networks whose
// skeleton has a cycle.
std::vector<std::vector<double>> polytree_marginals(const BeliefNetwork& net,
                                                    const Evidence& evidence);
std::vector<double> polytree_exact(const BeliefNetwork& net, const Evidence& evidence,
                                   NodeId node);

}  // namespace lpe
