#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "lpe/network.hpp"

namespace lpe {

// Seedable generator whose output is fixed across platforms: the 64-bit
// Mersenne Twister (its sequence is pinned by the standard) with our own
// integer and real mappings, since the standard distributions are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next() { return engine_(); }
  // Uniform on [lo, hi], by rejection.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
  // Uniform on [0, 1) with 53 random bits.
  double uniform_real();

 private:
  std::mt19937_64 engine_;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GenSpec {
  enum class Topology { kPolytree, kLoopy };

  std::size_t node_count = 10;
  Topology topology = Topology::kPolytree;
  double arc_ratio = 1.0;  // arcs per node, loopy only
  std::size_t min_states = 2;
  std::size_t max_states = 4;
  std::size_t cpt_cap = 1000;  // values per CPT
  double evidence_fraction_max = 0.25;
  std::uint64_t seed = 1;
};

// Entries m * 10^-e with m uniform in 1..10 and e uniform in 1..5, then the
// row is normalized.
std::vector<double> sample_skewed_row(std::size_t states, Rng& rng);

// Random tree skeleton from a Prüfer sequence, each edge oriented by a coin
// flip (reversed when that would push a CPT past the cap).
BeliefNetwork gen_polytree(const GenSpec& spec);

// The polytree for the same seed plus random acyclic arcs until the arc
// count reaches ceil(ratio * n). Arcs are drawn from a seed-determined
// sequence, so a higher ratio yields a superset of a lower one.
BeliefNetwork gen_loopy(const GenSpec& spec);

BeliefNetwork generate(const GenSpec& spec);

// Uniform count in [0, floor(n * fraction)], distinct uniform nodes, uniform
// states.
Evidence sample_evidence(const BeliefNetwork& net, Rng& rng, double fraction = 0.25);
Evidence sample_evidence(const BeliefNetwork& net, std::uint64_t seed, double fraction = 0.25);

}  // namespace lpe
