#include "ged/generate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "ged/rng.hpp"

namespace ged {
namespace {

void draw_labels(Graph& g, int alphabet, Rng& rng) {
  g.labels.assign(static_cast<std::size_t>(g.num_nodes), 0);
  if (alphabet > 1) {
    for (auto& label : g.labels) {
      label = static_cast<int>(rng.below(static_cast<std::uint64_t>(alphabet)));
    }
  }
}

Graph erdos_renyi(int n, double p, Rng& rng, int alphabet) {
  if (p < 0 || p > 1) {
    throw std::invalid_argument("edge probability must be in [0, 1]");
  }
  Graph g;
  g.num_nodes = n;
  draw_labels(g, alphabet, rng);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (rng.bernoulli(p)) g.edges.emplace_back(u, v);
    }
  }
  return g;
}

// Preferential attachment: seed clique on the first m nodes, then each
// arriving node links to m distinct targets drawn degree-proportionally
// (uniformly while no edges exist yet).
Graph power_law(int n, double param, Rng& rng, int alphabet) {
  const int m = static_cast<int>(param);
  if (param != std::floor(param) || m < 1) {
    throw std::invalid_argument("attachments per node must be a positive integer");
  }
  if (m >= n) {
    throw std::invalid_argument("attachments per node must be below n");
  }
  Graph g;
  g.num_nodes = n;
  draw_labels(g, alphabet, rng);

  std::vector<int> endpoint_urn;  // node id repeated once per incident edge
  auto add_edge = [&](int u, int v) {
    g.edges.emplace_back(std::min(u, v), std::max(u, v));
    endpoint_urn.push_back(u);
    endpoint_urn.push_back(v);
  };

  for (int u = 0; u < m; ++u) {
    for (int v = u + 1; v < m; ++v) add_edge(u, v);
  }
  std::vector<int> targets;
  for (int t = m; t < n; ++t) {
    targets.clear();
    while (static_cast<int>(targets.size()) < m) {
      int candidate;
      if (endpoint_urn.empty()) {
        candidate = static_cast<int>(rng.below(static_cast<std::uint64_t>(t)));
      } else {
        candidate = endpoint_urn[rng.below(endpoint_urn.size())];
      }
      if (std::find(targets.begin(), targets.end(), candidate) == targets.end()) {
        targets.push_back(candidate);
      }
    }
    for (int v : targets) add_edge(t, v);
  }
  normalize_edges(g);
  return g;
}

// Ring lattice with k/2 neighbors on each side; every lattice edge is
// rewired away from its clockwise endpoint with probability 0.1.
Graph small_world(int n, double param, Rng& rng, int alphabet) {
  const int k = static_cast<int>(param);
  if (param != std::floor(param) || k < 0 || k % 2 != 0) {
    throw std::invalid_argument("neighbors per node must be a non-negative even integer");
  }
  if (k >= n) {
    throw std::invalid_argument("neighbors per node must be below n");
  }
  constexpr double kRewire = 0.1;

  Graph g;
  g.num_nodes = n;
  draw_labels(g, alphabet, rng);

  std::vector<std::unordered_set<int>> adj(static_cast<std::size_t>(n));
  auto connect = [&](int u, int v) {
    adj[static_cast<std::size_t>(u)].insert(v);
    adj[static_cast<std::size_t>(v)].insert(u);
  };
  auto disconnect = [&](int u, int v) {
    adj[static_cast<std::size_t>(u)].erase(v);
    adj[static_cast<std::size_t>(v)].erase(u);
  };

  for (int offset = 1; offset <= k / 2; ++offset) {
    for (int u = 0; u < n; ++u) connect(u, (u + offset) % n);
  }
  for (int offset = 1; offset <= k / 2; ++offset) {
    for (int u = 0; u < n; ++u) {
      const int v = (u + offset) % n;
      if (!adj[static_cast<std::size_t>(u)].count(v)) continue;  // already rewired away
      if (!rng.bernoulli(kRewire)) continue;
      if (static_cast<int>(adj[static_cast<std::size_t>(u)].size()) >= n - 1) continue;
      for (;;) {
        const int w = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        if (w == u || adj[static_cast<std::size_t>(u)].count(w)) continue;
        disconnect(u, v);
        connect(u, w);
        break;
      }
    }
  }
  for (int u = 0; u < n; ++u) {
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (u < v) g.edges.emplace_back(u, v);
    }
  }
  normalize_edges(g);
  return g;
}

}  // namespace

GraphModel parse_graph_model(const std::string& name) {
  if (name == "er" || name == "erdos_renyi") return GraphModel::erdos_renyi;
  if (name == "pl" || name == "ba" || name == "power_law") {
    return GraphModel::power_law;
  }
  if (name == "sw" || name == "ws" || name == "small_world") {
    return GraphModel::small_world;
  }
  throw std::invalid_argument("unknown graph model: " + name);
}

std::string graph_model_name(GraphModel model) {
  switch (model) {
    case GraphModel::erdos_renyi: return "erdos_renyi";
    case GraphModel::power_law: return "power_law";
    case GraphModel::small_world: return "small_world";
  }
  return "?";
}

Graph generate_synthetic(GraphModel model, int n, double param,
                         std::uint64_t seed, int alphabet) {
  if (n < 1) throw std::invalid_argument("graph size must be positive");
  if (alphabet < 1) throw std::invalid_argument("alphabet must be positive");
  Rng rng(seed);
  switch (model) {
    case GraphModel::erdos_renyi: return erdos_renyi(n, param, rng, alphabet);
    case GraphModel::power_law: return power_law(n, param, rng, alphabet);
    case GraphModel::small_world: return small_world(n, param, rng, alphabet);
  }
  throw std::invalid_argument("unknown graph model");
}

std::int64_t perturb_capacity(const Graph& g, int alphabet) {
  const std::int64_t n = g.num_nodes;
  std::int64_t slots = n * (n - 1) / 2;
  if (alphabet > 1) slots += n;
  return slots;
}

std::pair<Graph, EditVector> perturb(const Graph& g, int delta,
                                     std::uint64_t seed, int alphabet) {
  if (delta < 0) throw std::invalid_argument("delta must be non-negative");
  if (alphabet < 1) throw std::invalid_argument("alphabet must be positive");
  const std::int64_t pair_slots =
      static_cast<std::int64_t>(g.num_nodes) * (g.num_nodes - 1) / 2;
  const std::int64_t capacity = perturb_capacity(g, alphabet);
  if (delta > capacity) {
    throw std::invalid_argument("delta exceeds the number of distinct edits");
  }

  Rng rng(seed);
  Graph edited = g;
  EditVector ops;

  // Partial Fisher-Yates over slot indices; the map holds displaced entries
  // so the full slot array is never materialised.
  std::unordered_map<std::int64_t, std::int64_t> moved;
  auto slot_at = [&](std::int64_t pos) {
    auto it = moved.find(pos);
    return it == moved.end() ? pos : it->second;
  };
  for (int i = 0; i < delta; ++i) {
    const std::int64_t j =
        i + static_cast<std::int64_t>(
                rng.below(static_cast<std::uint64_t>(capacity - i)));
    const std::int64_t slot = slot_at(j);
    moved[j] = slot_at(i);

    if (slot < pair_slots) {
      // Decode triangular index to the node pair (u, v), u < v.
      std::int64_t s = slot;
      int u = 0;
      while (s >= g.num_nodes - 1 - u) {
        s -= g.num_nodes - 1 - u;
        ++u;
      }
      const int v = u + 1 + static_cast<int>(s);
      if (edited.has_edge(u, v)) {
        edited.edges.erase(std::find(edited.edges.begin(), edited.edges.end(),
                                     std::make_pair(u, v)));
        ++ops.edge_del;
      } else {
        edited.edges.emplace_back(u, v);
        normalize_edges(edited);
        ++ops.edge_ins;
      }
    } else {
      const auto node = static_cast<std::size_t>(slot - pair_slots);
      const int old_label = edited.labels[node];
      int fresh = static_cast<int>(rng.below(static_cast<std::uint64_t>(alphabet - 1)));
      if (fresh >= old_label) ++fresh;
      edited.labels[node] = fresh;
      ++ops.node_sub;
    }
  }
  normalize_edges(edited);
  return {std::move(edited), ops};
}

}  // namespace ged
