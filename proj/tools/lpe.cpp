// Command-line front end: network generation, anytime queries, exact
// marginals and the benchmark runner.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lpe/bench.hpp"
#include "lpe/engine.hpp"
#include "lpe/graph.hpp"
#include "lpe/netgen.hpp"
#include "lpe/oracle.hpp"

namespace {

using namespace lpe;

constexpr int kExitSatisfied = 0;
constexpr int kExitError = 1;
constexpr int kExitSaturated = 2;
constexpr int kExitBudget = 3;

NodeId resolve_node(const BeliefNetwork& net, const std::string& text) {
  if (auto id = net.find(text)) return *id;
  throw NetworkError("unknown node '" + text + "'");
}

Evidence collect_evidence(const ParsedNetwork& parsed, const std::vector<std::string>& extra) {
  Evidence ev = parsed.evidence;
  for (const auto& obs : extra) {
    const auto [id, state] = parse_observation(parsed.network, obs);
    ev[id] = state;
  }
  return ev;
}

// "ID:STATE>P" or "ID:STATE<P".
std::pair<NodeId, Threshold> parse_threshold(const BeliefNetwork& net, const std::string& text) {
  const auto colon = text.find(':');
  const auto op = text.find_first_of("<>", colon == std::string::npos ? 0 : colon);
  if (colon == std::string::npos || op == std::string::npos || op < colon) {
    throw std::invalid_argument("threshold must look like ID:STATE>P or ID:STATE<P");
  }
  const NodeId id = resolve_node(net, text.substr(0, colon));
  const std::string state = text.substr(colon + 1, op - colon - 1);
  const auto s = net.find_state(id, state);
  if (!s) throw std::invalid_argument("unknown state '" + state + "'");
  Threshold t;
  t.state = *s;
  t.direction = text[op] == '>' ? Threshold::Direction::kGreater : Threshold::Direction::kLess;
  std::size_t used = 0;
  const std::string number = text.substr(op + 1);
  t.probability = std::stod(number, &used);
  if (used != number.size() || t.probability < 0.0 || t.probability > 1.0) {
    throw std::invalid_argument("threshold probability must be a number in [0, 1]");
  }
  return {id, t};
}

Strategy parse_strategy(const std::string& name, std::size_t delay) {
  if (name == "bfs") return Strategy::breadth_first();
  if (name == "no-loops") return Strategy::no_loops();
  if (name == "delayed") return Strategy::delayed_loops(delay);
  throw std::invalid_argument("unknown strategy '" + name + "'");
}

std::string format_bel(const BeliefNetwork& net, NodeId id, const IntervalVector& bel) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6);
  for (std::size_t s = 0; s < bel.size(); ++s) {
    if (s) out << "  ";
    out << net.node(id).states[s] << "=[" << bel[s].lo << ", " << bel[s].hi << "]";
  }
  return out.str();
}

int cmd_gen(std::size_t nodes, const std::string& topology, double ratio, std::uint64_t seed,
            const std::string& out, bool no_evidence) {
  GenSpec spec;
  spec.node_count = nodes;
  spec.seed = seed;
  if (topology == "polytree") {
    spec.topology = GenSpec::Topology::kPolytree;
  } else if (topology == "loopy") {
    spec.topology = GenSpec::Topology::kLoopy;
    spec.arc_ratio = ratio;
  } else {
    throw std::invalid_argument("topology must be polytree or loopy");
  }
  const BeliefNetwork net = generate(spec);
  const Evidence ev = no_evidence ? Evidence{} : sample_evidence(net, seed);
  if (out == "-") {
    std::cout << serialize_network(net, ev);
  } else {
    save_network(out, net, ev);
    std::cerr << "wrote " << out << ": " << net.size() << " nodes, " << net.arc_count()
              << " arcs, " << ev.size() << " observed\n";
  }
  return 0;
}

int cmd_query(const std::string& file, const std::string& node,
              const std::vector<std::string>& evidence, const std::string& strategy_name,
              std::size_t delay, std::optional<double> target, const std::string& threshold,
              std::optional<std::int64_t> budget_ms) {
  const ParsedNetwork parsed = load_network(file);
  const BeliefNetwork& net = parsed.network;
  const NodeId query = resolve_node(net, node);
  const Evidence ev = collect_evidence(parsed, evidence);
  const Strategy strategy = parse_strategy(strategy_name, delay);

  StopCriterion stop = TargetWidth{0.0};
  if (!threshold.empty()) {
    const auto [id, t] = parse_threshold(net, threshold);
    if (id != query) throw std::invalid_argument("threshold must name the queried node");
    stop = t;
  } else if (target) {
    stop = TargetWidth{*target};
  }
  Budget budget;
  if (budget_ms) budget.time = std::chrono::milliseconds(*budget_ms);

  QueryOptions options;
  std::size_t iteration = 0;
  options.on_iteration = [&](const IterationRecord& rec) {
    std::cout << "iter " << ++iteration << "  nodes " << rec.active_nodes << "  arcs "
              << rec.active_arcs << "  width " << std::fixed << std::setprecision(6) << rec.width
              << "  " << format_bel(net, query, rec.bel) << '\n';
  };
  const QueryResult result = answer_query(net, query, ev, strategy, stop, budget, options);
  std::cout << "status " << to_string(result.status) << '\n';
  if (result.threshold_answer) {
    std::cout << "answer " << (*result.threshold_answer ? "true" : "false") << '\n';
  }
  std::cout << "bel " << format_bel(net, query, result.bel) << '\n';
  switch (result.status) {
    case QueryStatus::kSatisfied: return kExitSatisfied;
    case QueryStatus::kSaturated: return kExitSaturated;
    case QueryStatus::kBudgetExhausted: return kExitBudget;
  }
  return kExitError;
}

int cmd_exact(const std::string& file, const std::string& node,
              const std::vector<std::string>& evidence) {
  const ParsedNetwork parsed = load_network(file);
  const BeliefNetwork& net = parsed.network;
  const NodeId id = resolve_node(net, node);
  const Evidence ev = collect_evidence(parsed, evidence);
  std::cout << std::setprecision(12);
  const auto marginal = enumerate_marginal(net, ev, id);
  std::cout << "enumeration";
  for (std::size_t s = 0; s < marginal.size(); ++s) {
    std::cout << "  " << net.node(id).states[s] << '=' << marginal[s];
  }
  std::cout << '\n';
  if (is_polytree(net)) {
    const auto pt = polytree_exact(net, ev, id);
    std::cout << "polytree   ";
    for (std::size_t s = 0; s < pt.size(); ++s) {
      std::cout << "  " << net.node(id).states[s] << '=' << pt[s];
    }
    std::cout << '\n';
  }
  return 0;
}

int cmd_bench(const std::string& suite_path, const std::string& out, bool csv) {
  const SuiteSpec suite = load_suite(suite_path);
  const auto records = run_bench(suite);
  std::ofstream file;
  std::ostream* stream = &std::cout;
  if (out != "-") {
    file.open(out);
    if (!file) throw std::runtime_error("cannot write " + out);
    stream = &file;
  }
  if (csv) {
    write_csv(*stream, records);
  } else {
    write_jsonl(*stream, records);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Localized partial evaluation of belief networks"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate a random network");
  std::size_t gen_nodes = 0;
  std::string gen_topology = "polytree", gen_out = "-";
  double gen_ratio = 1.1;
  std::uint64_t gen_seed = 1;
  bool gen_no_evidence = false;
  gen->add_option("--nodes", gen_nodes, "node count")->required();
  gen->add_option("--topology", gen_topology, "polytree or loopy");
  gen->add_option("--ratio", gen_ratio, "arcs per node (loopy)");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--out", gen_out, "output file, - for stdout");
  gen->add_flag("--no-evidence", gen_no_evidence, "do not sample evidence");

  auto* query = app.add_subcommand("query", "anytime bounds on one node's posterior");
  std::string q_file, q_node, q_strategy = "bfs", q_threshold;
  std::vector<std::string> q_evidence;
  std::size_t q_delay = 5;
  std::optional<double> q_target;
  std::optional<std::int64_t> q_budget;
  query->add_option("file", q_file, "network file")->required();
  query->add_option("--node", q_node, "queried node")->required();
  query->add_option("--evidence", q_evidence, "observations ID=STATE");
  query->add_option("--strategy", q_strategy, "bfs, no-loops or delayed");
  query->add_option("--delay", q_delay, "rounds an arc is held back (delayed)");
  auto* target_opt = query->add_option("--target-width", q_target, "stop when every interval is this narrow");
  auto* threshold_opt = query->add_option("--threshold", q_threshold, "stop when ID:STATE>P (or <) is decided");
  target_opt->excludes(threshold_opt);
  query->add_option("--budget-ms", q_budget, "time budget in milliseconds");

  auto* exact = app.add_subcommand("exact", "exact marginal by enumeration");
  std::string e_file, e_node;
  std::vector<std::string> e_evidence;
  exact->add_option("file", e_file, "network file")->required();
  exact->add_option("--node", e_node, "queried node")->required();
  exact->add_option("--evidence", e_evidence, "observations ID=STATE");

  auto* bench = app.add_subcommand("bench", "run a benchmark suite");
  std::string b_suite, b_out = "-";
  bool b_csv = false;
  bench->add_option("--suite", b_suite, "suite JSON")->required();
  bench->add_option("--out", b_out, "output file, - for stdout");
  bench->add_flag("--csv", b_csv, "write CSV instead of JSON lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*gen) return cmd_gen(gen_nodes, gen_topology, gen_ratio, gen_seed, gen_out, gen_no_evidence);
    if (*query) {
      return cmd_query(q_file, q_node, q_evidence, q_strategy, q_delay, q_target, q_threshold,
                       q_budget);
    }
    if (*exact) return cmd_exact(e_file, e_node, e_evidence);
    if (*bench) return cmd_bench(b_suite, b_out, b_csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
