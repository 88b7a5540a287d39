#ifndef GED_EXACT_HPP
#define GED_EXACT_HPP

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "ged/graph.hpp"

namespace ged {

// Placeholder partner for deleted/inserted nodes in a mapping.
constexpr int kEpsilon = -1;

// Node alignment between a query and a data graph. Each entry pairs a query
// node (or kEpsilon) with a data node (or kEpsilon). A well-formed mapping
// covers every node of both graphs exactly once and has no (eps, eps) entry.
using Mapping = std::vector<std::pair<int, int>>;

// Expense of the edit script induced by a node mapping: mismatched labels pay
// node substitution, eps partners pay deletion/insertion, and each edge pays
// deletion (query side) or insertion (data side) unless the mapping carries it
// onto an existing counterpart. Throws std::invalid_argument on a malformed
// mapping.
double alignment_expense(const Graph& query, const Graph& data,
                         const Mapping& mapping, const CostSetting& costs);

struct GedResult {
  double expense = 0;
  Mapping mapping;
  bool optimal = false;
};

// Exhaustive reference solver. Pads the smaller side with eps and scores
// every bijection between the padded node sets in lexicographic order, so
// ties resolve to the first enumerated mapping. Guarded to
// max(|V_q|, |V_d|) <= 8.
GedResult brute_force_ged(const Graph& query, const Graph& data,
                          const CostSetting& costs);

// Unmatched remainder of one side of a partial alignment.
struct Remainder {
  std::vector<int> labels;      // labels of undecided (or unused) nodes
  std::int64_t edge_count = 0;  // edges still lacking a priced counterpart
};

// Admissible completion bound: label-multiset matching over the remaining
// nodes plus an edge-count imbalance term. Never exceeds the true remaining
// expense.
double lower_bound(const Remainder& query_side, const Remainder& data_side,
                   const CostSetting& costs);

struct AstarStats {
  std::size_t expanded = 0;
  std::size_t generated = 0;
  bool budget_exhausted = false;
};

inline constexpr std::size_t kDefaultAstarBudget = 1'000'000;

// Best-first search over partial query-node assignments, guided by
// lower_bound. Query nodes are decided in descending-degree order (index
// ascending on ties); leftover data nodes are inserted in one batch when a
// branch reaches full depth. Expanding more than node_budget states aborts
// the search and returns the best alignment seen, flagged non-optimal.
GedResult astar_ged(const Graph& query, const Graph& data,
                    const CostSetting& costs,
                    std::size_t node_budget = kDefaultAstarBudget,
                    AstarStats* stats = nullptr);

}  // namespace ged

#endif
