#include "ged/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ged {

bool Graph::has_edge(int u, int v) const {
  if (u == v) return false;
  if (u > v) std::swap(u, v);
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
}

std::vector<int> Graph::degrees() const {
  std::vector<int> deg(static_cast<std::size_t>(num_nodes), 0);
  for (const auto& [u, v] : edges) {
    ++deg[static_cast<std::size_t>(u)];
    ++deg[static_cast<std::size_t>(v)];
  }
  return deg;
}

std::vector<std::vector<int>> Graph::adjacency_lists() const {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(num_nodes));
  for (const auto& [u, v] : edges) {
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }
  return adj;
}

void normalize_edges(Graph& g) {
  for (auto& e : g.edges) {
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
}

std::vector<std::string> validate(const Graph& g) {
  std::vector<std::string> problems;
  if (g.num_nodes < 0) problems.push_back("num_nodes is negative");
  if (g.labels.size() != static_cast<std::size_t>(std::max(g.num_nodes, 0))) {
    std::ostringstream msg;
    msg << "labels has " << g.labels.size() << " entries for " << g.num_nodes
        << " nodes";
    problems.push_back(msg.str());
  }
  for (std::size_t i = 0; i < g.labels.size(); ++i) {
    // labels index one-hot vocabularies, so they cannot be negative
    if (g.labels[i] < 0) {
      std::ostringstream msg;
      msg << "node " << i << " has negative label " << g.labels[i];
      problems.push_back(msg.str());
    }
  }
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto [u, v] = g.edges[i];
    if (u < 0 || v < 0 || u >= g.num_nodes || v >= g.num_nodes) {
      std::ostringstream msg;
      msg << "edge " << i << " (" << u << "," << v << ") out of range";
      problems.push_back(msg.str());
    } else if (u == v) {
      std::ostringstream msg;
      msg << "edge " << i << " is a self-loop at node " << u;
      problems.push_back(msg.str());
    } else if (u > v) {
      std::ostringstream msg;
      msg << "edge " << i << " (" << u << "," << v
          << ") has endpoints out of order";
      problems.push_back(msg.str());
    }
    if (i > 0 && !(g.edges[i - 1] < g.edges[i])) {
      std::ostringstream msg;
      msg << "edge " << i << " breaks sorted/unique order";
      problems.push_back(msg.str());
    }
  }
  return problems;
}

bool CostSetting::all_integral() const {
  for (double c : as_array()) {
    if (std::floor(c) != c) return false;
  }
  return true;
}

CostSetting CostSetting::parse(const std::string& text) {
  if (text == "uniform") return uniform();
  if (text == "setting1") return setting1();
  if (text == "setting2") return setting2();

  std::array<double, 5> values{};
  std::stringstream stream(text);
  std::string item;
  std::size_t count = 0;
  while (std::getline(stream, item, ',')) {
    if (count >= values.size()) {
      throw std::invalid_argument("cost setting needs exactly 5 values: " + text);
    }
    std::size_t used = 0;
    values[count] = std::stod(item, &used);
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) {
      throw std::invalid_argument("bad cost value '" + item + "'");
    }
    ++count;
  }
  if (count != values.size()) {
    throw std::invalid_argument("cost setting needs exactly 5 values: " + text);
  }
  for (double v : values) {
    if (!(v >= 0) || !std::isfinite(v)) {
      throw std::invalid_argument("costs must be finite and non-negative: " + text);
    }
  }
  return {values[0], values[1], values[2], values[3], values[4]};
}

double edit_vector_expense(const EditVector& ops, const CostSetting& costs) {
  return static_cast<double>(ops.node_sub) * costs.node_sub +
         static_cast<double>(ops.node_del) * costs.node_del +
         static_cast<double>(ops.node_ins) * costs.node_ins +
         static_cast<double>(ops.edge_del) * costs.edge_del +
         static_cast<double>(ops.edge_ins) * costs.edge_ins;
}

}  // namespace ged
