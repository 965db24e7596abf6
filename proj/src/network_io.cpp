#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lpe/network.hpp"

namespace lpe {

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) {
    line = line.substr(0, hash);
  }
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

double parse_real(std::string_view token, std::size_t line) {
  double value = 0.0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line, "expected a decimal number, got '" + std::string(token) + "'");
  }
  return value;
}

std::string format_real(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                 std::chars_format::general, 17);
  return std::string(buffer, ptr);
}

}  // namespace

ParsedNetwork parse_network(std::string_view text) {
  ParsedNetwork out;
  BeliefNetwork& net = out.network;
  std::vector<bool> has_cpt;
  std::vector<std::pair<std::size_t, std::pair<NodeId, std::string>>> evidence_lines;

  // Pending CPT block: node and rows still expected.
  std::optional<NodeId> cpt_node;
  std::size_t cpt_rows_left = 0;
  std::vector<double> cpt_values;

  auto node_ref = [&](std::string_view name, std::size_t line) {
    if (auto id = net.find(name)) return *id;
    throw ParseError(line, "unknown node '" + std::string(name) + "'");
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    const auto tokens = tokenize(line);
    if (tokens.empty()) {
      if (eol == text.size()) break;
      continue;
    }

    if (cpt_node) {
      const std::size_t k = net.state_count(*cpt_node);
      if (tokens.size() != k) {
        throw ParseError(line_no, "cpt row for '" + net.node(*cpt_node).name +
                                      "' needs " + std::to_string(k) + " values");
      }
      double sum = 0.0;
      for (auto t : tokens) {
        const double p = parse_real(t, line_no);
        if (!(p >= 0.0 && p <= 1.0)) {
          throw ParseError(line_no, "probability outside [0, 1]");
        }
        cpt_values.push_back(p);
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        throw ParseError(line_no, "cpt row sums to " + format_real(sum));
      }
      if (--cpt_rows_left == 0) {
        net.set_cpt(*cpt_node, std::move(cpt_values));
        has_cpt[*cpt_node] = true;
        cpt_values.clear();
        cpt_node.reset();
      }
      if (eol == text.size()) break;
      continue;
    }

    const std::string_view keyword = tokens[0];
    if (keyword == "network") {
      if (tokens.size() != 2) throw ParseError(line_no, "usage: network <name>");
      net.set_name(std::string(tokens[1]));
    } else if (keyword == "node") {
      if (tokens.size() < 5 || tokens[2] != "states") {
        throw ParseError(line_no, "usage: node <id> states <s1> <s2> ...");
      }
      std::vector<std::string> states(tokens.begin() + 3, tokens.end());
      try {
        net.add_node(std::string(tokens[1]), std::move(states));
      } catch (const NetworkError& e) {
        throw ParseError(line_no, e.what());
      }
      has_cpt.push_back(false);
    } else if (keyword == "parents") {
      if (tokens.size() < 2) throw ParseError(line_no, "usage: parents <id> [<p> ...]");
      const NodeId id = node_ref(tokens[1], line_no);
      if (has_cpt[id]) {
        throw ParseError(line_no, "parents of '" + std::string(tokens[1]) +
                                      "' must be declared before its cpt");
      }
      std::vector<NodeId> parents;
      for (std::size_t i = 2; i < tokens.size(); ++i) {
        parents.push_back(node_ref(tokens[i], line_no));
      }
      try {
        net.set_parents(id, std::move(parents));
      } catch (const NetworkError& e) {
        throw ParseError(line_no, e.what());
      }
    } else if (keyword == "cpt") {
      if (tokens.size() != 2) throw ParseError(line_no, "usage: cpt <id>");
      const NodeId id = node_ref(tokens[1], line_no);
      if (has_cpt[id]) throw ParseError(line_no, "duplicate cpt for '" + std::string(tokens[1]) + "'");
      cpt_node = id;
      cpt_rows_left = net.parent_config_count(id);
      cpt_values.clear();
    } else if (keyword == "evidence") {
      if (tokens.size() != 3) throw ParseError(line_no, "usage: evidence <id> <state>");
      evidence_lines.push_back({line_no, {node_ref(tokens[1], line_no), std::string(tokens[2])}});
    } else {
      throw ParseError(line_no, "unknown declaration '" + std::string(keyword) + "'");
    }
    if (eol == text.size()) break;
  }

  if (cpt_node) {
    throw ParseError(line_no, "cpt for '" + net.node(*cpt_node).name + "' is missing " +
                                  std::to_string(cpt_rows_left) + " row(s)");
  }
  for (NodeId id = 0; id < net.size(); ++id) {
    if (!has_cpt[id]) throw NetworkError("node '" + net.node(id).name + "' has no cpt");
  }
  net.validate();

  for (const auto& [line, obs] : evidence_lines) {
    const auto state = net.find_state(obs.first, obs.second);
    if (!state) throw ParseError(line, "unknown state '" + obs.second + "'");
    if (out.evidence.count(obs.first)) {
      throw ParseError(line, "node '" + net.node(obs.first).name + "' observed twice");
    }
    out.evidence[obs.first] = *state;
  }
  return out;
}

ParsedNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NetworkError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_network(buffer.str());
}

std::string serialize_network(const BeliefNetwork& net, const Evidence& evidence) {
  std::ostringstream os;
  os << "network " << net.name() << '\n';
  for (const auto& node : net.nodes()) {
    os << "node " << node.name << " states";
    for (const auto& s : node.states) os << ' ' << s;
    os << '\n';
  }
  for (NodeId id = 0; id < net.size(); ++id) {
    const Node& node = net.node(id);
    if (!node.parents.empty()) {
      os << "parents " << node.name;
      for (NodeId p : node.parents) os << ' ' << net.node(p).name;
      os << '\n';
    }
    os << "cpt " << node.name << '\n';
    const std::size_t k = node.states.size();
    for (std::size_t r = 0; r < net.parent_config_count(id); ++r) {
      for (std::size_t s = 0; s < k; ++s) {
        if (s) os << ' ';
        os << format_real(node.cpt[r * k + s]);
      }
      os << '\n';
    }
  }
  for (const auto& [id, state] : evidence) {
    os << "evidence " << net.node(id).name << ' ' << net.node(id).states.at(state) << '\n';
  }
  return os.str();
}

void save_network(const std::string& path, const BeliefNetwork& net,
                  const Evidence& evidence) {
  std::ofstream out(path);
  if (!out) throw NetworkError("cannot write '" + path + "'");
  out << serialize_network(net, evidence);
}

std::pair<NodeId, std::size_t> parse_observation(const BeliefNetwork& net,
                                                 std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw NetworkError("evidence must look like ID=STATE, got '" + std::string(text) + "'");
  }
  const NodeId id = net.id_of(text.substr(0, eq));
  const auto state = net.find_state(id, text.substr(eq + 1));
  if (!state) {
    throw NetworkError("node '" + net.node(id).name + "' has no state '" +
                       std::string(text.substr(eq + 1)) + "'");
  }
  return {id, *state};
}

}  // namespace lpe
