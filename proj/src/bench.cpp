#include "lpe/bench.hpp"

#include <atomic>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lpe/graph.hpp"
#include "lpe/loops.hpp"
#include "lpe/oracle.hpp"

namespace lpe {

namespace {

using nlohmann::json;

Strategy parse_strategy(const std::string& name, std::size_t delay) {
  if (name == "bfs") return Strategy::breadth_first();
  if (name == "no-loops") return Strategy::no_loops();
  if (name == "delayed") return Strategy::delayed_loops(delay);
  throw std::invalid_argument("unknown strategy '" + name + "'");
}

GenSpec::Topology parse_topology(const std::string& name) {
  if (name == "polytree") return GenSpec::Topology::kPolytree;
  if (name == "loopy") return GenSpec::Topology::kLoopy;
  throw std::invalid_argument("unknown topology '" + name + "'");
}

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

}  // namespace

SuiteSpec parse_suite(const std::string& json_text) {
  const json j = json::parse(json_text);
  SuiteSpec suite;
  const std::size_t delay = j.value("delay", std::size_t{5});
  for (const auto& g : j.at("networks")) {
    NetworkGroup group;
    group.topology = parse_topology(g.at("topology").get<std::string>());
    const auto& nodes = g.at("nodes");
    if (nodes.is_array()) {
      group.sizes = nodes.get<std::vector<std::size_t>>();
    } else {
      group.sizes = {nodes.get<std::size_t>()};
    }
    group.count = g.value("count", std::size_t{1});
    group.seed = g.value("seed", std::uint64_t{1});
    group.ratio = g.value("ratio", group.topology == GenSpec::Topology::kLoopy ? 1.1 : 1.0);
    group.evidence = g.value("evidence", true);
    suite.networks.push_back(group);
  }
  suite.queries_per_network = j.value("queries_per_network", suite.queries_per_network);
  if (j.contains("strategies")) {
    suite.strategies.clear();
    for (const auto& s : j.at("strategies")) suite.strategies.push_back(parse_strategy(s, delay));
  }
  if (j.contains("target_widths")) suite.target_widths = j.at("target_widths").get<std::vector<double>>();
  suite.budget = std::chrono::milliseconds(j.value("budget_ms", std::int64_t{60000}));
  suite.baseline = j.value("baseline", true);
  suite.jobs = std::max<std::size_t>(1, j.value("jobs", std::size_t{1}));
  return suite;
}

SuiteSpec load_suite(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open suite file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_suite(buf.str());
}

namespace {

struct BenchNetwork {
  std::string id;
  BeliefNetwork net;
  Evidence evidence;
  bool polytree = false;
  std::vector<NodeId> queries;
};

std::vector<BenchNetwork> build_networks(const SuiteSpec& suite) {
  std::vector<BenchNetwork> out;
  for (const auto& group : suite.networks) {
    for (std::size_t size : group.sizes) {
      for (std::size_t i = 0; i < group.count; ++i) {
        GenSpec spec;
        spec.node_count = size;
        spec.topology = group.topology;
        spec.arc_ratio = group.ratio;
        spec.seed = group.seed + i;
        BenchNetwork b;
        b.net = generate(spec);
        b.id = b.net.name();
        b.polytree = group.topology == GenSpec::Topology::kPolytree;
        if (group.evidence) b.evidence = sample_evidence(b.net, spec.seed);

        std::vector<NodeId> free;
        for (NodeId id = 0; id < b.net.size(); ++id) {
          if (!b.evidence.count(id)) free.push_back(id);
        }
        Rng pick(spec.seed, 0x7175657279ULL);
        const std::size_t q = std::min(suite.queries_per_network, free.size());
        for (std::size_t k = 0; k < q; ++k) {
          std::swap(free[k], free[pick.uniform_int(k, free.size() - 1)]);
          b.queries.push_back(free[k]);
        }
        out.push_back(std::move(b));
      }
    }
  }
  return out;
}

// Full conditioning over the whole relevant set: every relevant node and
// every arc among them.
IntervalVector full_conditioning(const BeliefNetwork& net, const Evidence& evidence, NodeId query) {
  const auto relevant = relevant_mask(net, query, evidence);
  ActiveSet active(net.size(), query);
  for (NodeId id = 0; id < net.size(); ++id) {
    if (relevant[id]) active.add_node(id);
  }
  for (const Arc& a : net.arcs()) {
    if (relevant[a.parent] && relevant[a.child]) active.add_arc(a);
  }
  return propagate_mixed(net, active, evidence, query);
}

}  // namespace

std::vector<BenchRecord> run_bench(const SuiteSpec& suite) {
  const auto networks = build_networks(suite);

  struct Unit {
    std::size_t network;
    NodeId query;
    std::size_t first_id;
  };
  std::vector<Unit> units;
  const std::size_t per_query = suite.strategies.size() * suite.target_widths.size();
  std::size_t next_id = 0;
  for (std::size_t n = 0; n < networks.size(); ++n) {
    for (NodeId q : networks[n].queries) {
      units.push_back({n, q, next_id});
      next_id += per_query;
    }
  }
  std::vector<BenchRecord> records(next_id);

  auto run_unit = [&](const Unit& unit) {
    const BenchNetwork& b = networks[unit.network];
    std::string baseline_kind = "none";
    std::optional<double> baseline_ms;
    if (suite.baseline) {
      const auto t0 = Clock::now();
      try {
        if (b.polytree) {
          polytree_marginals(b.net, b.evidence);
          baseline_kind = "polytree";
        } else {
          full_conditioning(b.net, b.evidence, unit.query);
          baseline_kind = "conditioning";
        }
        baseline_ms = elapsed_ms(t0);
      } catch (const std::exception&) {
        baseline_kind = "error";
      }
    }

    std::size_t id = unit.first_id;
    for (const Strategy& strategy : suite.strategies) {
      for (double target : suite.target_widths) {
        BenchRecord& r = records[id];
        r.id = id++;
        r.network = b.id;
        r.nodes = b.net.size();
        r.arcs = b.net.arc_count();
        r.evidence = b.evidence.size();
        r.query = unit.query;
        r.strategy = to_string(strategy.kind);
        r.target_width = target;
        r.baseline_kind = baseline_kind;
        r.baseline_ms = baseline_ms;
        const auto t0 = Clock::now();
        try {
          Budget budget;
          budget.time = suite.budget;
          const QueryResult res =
              answer_query(b.net, unit.query, b.evidence, strategy, TargetWidth{target}, budget);
          r.status = to_string(res.status);
          r.width = res.width();
          r.bel = res.bel;
          r.iterations = res.iterations.size();
          r.active_nodes = res.iterations.empty() ? 1 : res.iterations.back().active_nodes;
          r.node_visits = res.node_visits;
        } catch (const std::exception& e) {
          r.status = "error";
          r.error = e.what();
        }
        r.wall_ms = elapsed_ms(t0);
      }
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(suite.jobs, units.size()));
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (std::size_t i; (i = cursor.fetch_add(1)) < units.size();) run_unit(units[i]);
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return records;
}

std::string to_json_line(const BenchRecord& r) {
  json j;
  j["id"] = r.id;
  j["network"] = r.network;
  j["nodes"] = r.nodes;
  j["arcs"] = r.arcs;
  j["evidence"] = r.evidence;
  j["query"] = r.query;
  j["strategy"] = r.strategy;
  j["target_width"] = r.target_width;
  j["status"] = r.status;
  if (!r.error.empty()) j["error"] = r.error;
  j["width"] = r.width;
  json bel = json::array();
  for (const auto& x : r.bel) bel.push_back({x.lo, x.hi});
  j["bel"] = bel;
  j["iterations"] = r.iterations;
  j["active_nodes"] = r.active_nodes;
  j["node_visits"] = r.node_visits;
  j["wall_ms"] = r.wall_ms;
  j["baseline"] = r.baseline_kind;
  j["baseline_ms"] = r.baseline_ms ? json(*r.baseline_ms) : json(nullptr);
  return j.dump();
}

void write_jsonl(std::ostream& out, const std::vector<BenchRecord>& records) {
  for (const auto& r : records) out << to_json_line(r) << '\n';
}

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << "id,network,nodes,arcs,evidence,query,strategy,target_width,status,width,"
         "iterations,active_nodes,node_visits,wall_ms,baseline,baseline_ms\n";
  out << std::setprecision(10);
  for (const auto& r : records) {
    out << r.id << ',' << r.network << ',' << r.nodes << ',' << r.arcs << ',' << r.evidence << ','
        << r.query << ',' << r.strategy << ',' << r.target_width << ',' << r.status << ','
        << r.width << ',' << r.iterations << ',' << r.active_nodes << ',' << r.node_visits << ','
        << r.wall_ms << ',' << r.baseline_kind << ',';
    if (r.baseline_ms) out << *r.baseline_ms;
    out << '\n';
  }
}

}  // namespace lpe
