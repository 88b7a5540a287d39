#ifndef GED_CLASSICAL_HPP
#define GED_CLASSICAL_HPP

#include <vector>

#include "ged/exact.hpp"
#include "ged/graph.hpp"

namespace ged {

struct LapResult {
  std::vector<int> assignment;  // row -> column
  double total = 0;
};

// Exact square linear assignment via shortest augmenting paths with
// potentials. Infinity entries mark forbidden cells; throws if no finite
// perfect assignment exists. Deterministic tie handling (scan order).
LapResult solve_lap(const std::vector<std::vector<double>>& cost);

// Bipartite upper bound: one linear assignment over node substitutions,
// deletions and insertions, with edge expenses charged per incident-degree
// surplus. The returned expense re-scores the induced node mapping, so it is
// always attainable (>= exact).
GedResult vj_ged(const Graph& query, const Graph& data,
                 const CostSetting& costs);

// Retained alignment prefixes per level, for inspecting beam behaviour.
// Each prefix lists the data partner (or kEpsilon) per decided query node,
// in decision order.
struct BeamTrace {
  std::vector<std::vector<std::vector<int>>> levels;
};

// Level-synchronous beam over the same decision order as astar_ged. At each
// level the candidate pool is ordered by (parent rank, f, partner index) and
// the first `width` survive; ranks seed the next level. Widening the beam
// never drops a previously retained prefix, so the expense is non-increasing
// in width. Width 1 is greedy descent.
GedResult beam_ged(const Graph& query, const Graph& data,
                   const CostSetting& costs, int width,
                   BeamTrace* trace = nullptr);

}  // namespace ged

#endif
