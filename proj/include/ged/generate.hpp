#ifndef GED_GENERATE_HPP
#define GED_GENERATE_HPP

#include <cstdint>
#include <string>
#include <utility>

#include "ged/graph.hpp"

namespace ged {

enum class GraphModel { erdos_renyi, power_law, small_world };

// Accepts er | erdos_renyi | pl | ba | power_law | sw | ws | small_world.
GraphModel parse_graph_model(const std::string& name);
std::string graph_model_name(GraphModel model);

// Seeded synthetic graph. The meaning of param depends on the model:
//   erdos_renyi  edge probability in [0, 1]
//   power_law    attachments per arriving node (>= 1, integral)
//   small_world  ring-lattice neighbors per node (even, < n); rewiring
//                probability is fixed at 0.1
// Labels are uniform over [0, alphabet); alphabet 1 means unlabeled.
Graph generate_synthetic(GraphModel model, int n, double param,
                         std::uint64_t seed, int alphabet = 1);

// Applies exactly delta distinct edits to a copy of g: edge toggles over the
// node-pair slots, plus label substitutions when alphabet > 1. Returns the
// edited graph and the operation counts that rebuild it from g. Throws if
// delta exceeds the number of available slots.
std::pair<Graph, EditVector> perturb(const Graph& g, int delta,
                                     std::uint64_t seed, int alphabet = 1);

// Number of distinct edits perturb can apply to g.
std::int64_t perturb_capacity(const Graph& g, int alphabet = 1);

}  // namespace ged

#endif
