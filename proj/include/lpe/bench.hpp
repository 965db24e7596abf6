#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lpe/engine.hpp"
#include "lpe/netgen.hpp"

namespace lpe {

// One group of generated networks: `count` networks per size, seeds
// seed, seed+1, ...
struct NetworkGroup {
  GenSpec::Topology topology = GenSpec::Topology::kPolytree;
  std::vector<std::size_t> sizes;
  std::size_t count = 1;
  std::uint64_t seed = 1;
  double ratio = 1.0;
  bool evidence = true;
};

struct SuiteSpec {
  std::vector<NetworkGroup> networks;
  std::size_t queries_per_network = 15;
  std::vector<Strategy> strategies{Strategy::breadth_first()};
  std::vector<double> target_widths{0.5};
  std::chrono::milliseconds budget{60000};
  bool baseline = true;
  std::size_t jobs = 1;
};

// Reads the JSON suite format described in the README.
SuiteSpec parse_suite(const std::string& json_text);
SuiteSpec load_suite(const std::string& path);

struct BenchRecord {
  std::size_t id = 0;
  std::string network;
  std::size_t nodes = 0;
  std::size_t arcs = 0;
  std::size_t evidence = 0;
  NodeId query = 0;
  std::string strategy;
  double target_width = 0.0;
  std::string status;  // satisfied | saturated | budget_exhausted | error
  std::string error;
  double width = 1.0;
  std::vector<Interval> bel;
  std::size_t iterations = 0;
  std::size_t active_nodes = 0;
  std::size_t node_visits = 0;
  double wall_ms = 0.0;
  std::string baseline_kind;  // polytree | conditioning | none | error
  std::optional<double> baseline_ms;
};

std::vector<BenchRecord> run_bench(const SuiteSpec& suite);

std::string to_json_line(const BenchRecord& record);
void write_jsonl(std::ostream& out, const std::vector<BenchRecord>& records);
void write_csv(std::ostream& out, const std::vector<BenchRecord>& records);

}  // namespace lpe
