#ifndef GED_GRAPH_HPP
#define GED_GRAPH_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ged {

// Undirected simple graph with integer node labels.
// Invariants (enforced by validate, assumed elsewhere):
//   labels.size() == num_nodes
//   every edge (u, v) has 0 <= u < v < num_nodes
//   edges sorted lexicographically, no duplicates
struct Graph {
  int num_nodes = 0;
  std::vector<int> labels;
  std::vector<std::pair<int, int>> edges;

  bool has_edge(int u, int v) const;
  std::vector<int> degrees() const;
  std::vector<std::vector<int>> adjacency_lists() const;
};

// Sorts edges, flips reversed endpoints, drops duplicates.
void normalize_edges(Graph& g);

// Returns human-readable violations; empty means the graph is well formed.
std::vector<std::string> validate(const Graph& g);

// Per-operation expenses, in the fixed order:
//   node substitution, node deletion, node insertion,
//   edge deletion, edge insertion.
// Deletions act on the query side, insertions supply the data side.
struct CostSetting {
  double node_sub = 1;
  double node_del = 1;
  double node_ins = 1;
  double edge_del = 1;
  double edge_ins = 1;

  std::array<double, 5> as_array() const {
    return {node_sub, node_del, node_ins, edge_del, edge_ins};
  }
  bool all_integral() const;

  static CostSetting uniform() { return {1, 1, 1, 1, 1}; }
  static CostSetting setting1() { return {1, 2, 1, 3, 1}; }
  static CostSetting setting2() { return {3, 2, 3, 0, 2}; }

  // Accepts "a,b,c,d,e" or a preset name (uniform | setting1 | setting2).
  static CostSetting parse(const std::string& text);
};

// Operation counts in the same order as CostSetting.
struct EditVector {
  std::int64_t node_sub = 0;
  std::int64_t node_del = 0;
  std::int64_t node_ins = 0;
  std::int64_t edge_del = 0;
  std::int64_t edge_ins = 0;

  std::int64_t total_ops() const {
    return node_sub + node_del + node_ins + edge_del + edge_ins;
  }
};

double edit_vector_expense(const EditVector& ops, const CostSetting& costs);

// A query/data graph pair with the costs it should be scored under.
struct GraphPair {
  Graph query;
  Graph data;
  CostSetting costs;
  std::optional<double> target;
};

// Pair referencing graphs by index into a shared graph list.
struct PairRecord {
  int query = 0;
  int data = 0;
  CostSetting costs;
  std::optional<double> target;
};

}  // namespace ged

#endif
