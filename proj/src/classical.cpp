#include "ged/classical.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ged {

LapResult solve_lap(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  for (const auto& row : cost) {
    if (static_cast<int>(row.size()) != n) {
      throw std::invalid_argument("assignment matrix must be square");
    }
    for (double c : row) {
      if (std::isnan(c)) throw std::invalid_argument("assignment matrix has NaN");
    }
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost[static_cast<std::size_t>(i0) - 1]
                               [static_cast<std::size_t>(j) - 1] -
                           u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      if (j1 < 0 || delta == inf) {
        throw std::runtime_error("no finite perfect assignment exists");
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  LapResult result;
  result.assignment.assign(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    if (p[static_cast<std::size_t>(j)] != 0) {
      result.assignment[static_cast<std::size_t>(p[static_cast<std::size_t>(j)]) - 1] =
          j - 1;
    }
  }
  for (int i = 0; i < n; ++i) {
    result.total += cost[static_cast<std::size_t>(i)]
                        [static_cast<std::size_t>(result.assignment[static_cast<std::size_t>(i)])];
  }
  return result;
}

GedResult vj_ged(const Graph& query, const Graph& data,
                 const CostSetting& costs) {
  const int nq = query.num_nodes;
  const int nd = data.num_nodes;
  const int n = nq + nd;
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<int> deg_q = query.degrees();
  const std::vector<int> deg_d = data.degrees();

  // Square block matrix: substitutions | deletions / insertions | zero.
  // Degree surpluses stand in for the edge expenses a node choice drags along.
  std::vector<std::vector<double>> cost(
      static_cast<std::size_t>(n),
      std::vector<double>(static_cast<std::size_t>(n), inf));
  for (int i = 0; i < nq; ++i) {
    for (int j = 0; j < nd; ++j) {
      const double label_part =
          query.labels[static_cast<std::size_t>(i)] ==
                  data.labels[static_cast<std::size_t>(j)]
              ? 0
              : costs.node_sub;
      const int surplus_q = std::max(0, deg_q[static_cast<std::size_t>(i)] -
                                            deg_d[static_cast<std::size_t>(j)]);
      const int surplus_d = std::max(0, deg_d[static_cast<std::size_t>(j)] -
                                            deg_q[static_cast<std::size_t>(i)]);
      cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          label_part + surplus_q * costs.edge_del + surplus_d * costs.edge_ins;
    }
    cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(nd + i)] =
        costs.node_del + deg_q[static_cast<std::size_t>(i)] * costs.edge_del;
  }
  for (int j = 0; j < nd; ++j) {
    cost[static_cast<std::size_t>(nq + j)][static_cast<std::size_t>(j)] =
        costs.node_ins + deg_d[static_cast<std::size_t>(j)] * costs.edge_ins;
  }
  for (int i = 0; i < nq; ++i) {
    for (int j = 0; j < nd; ++j) {
      cost[static_cast<std::size_t>(nq + j)][static_cast<std::size_t>(nd + i)] = 0;
    }
  }

  const LapResult lap = solve_lap(cost);

  Mapping mapping;
  std::vector<bool> data_used(static_cast<std::size_t>(nd), false);
  for (int i = 0; i < nq; ++i) {
    const int col = lap.assignment[static_cast<std::size_t>(i)];
    if (col < nd) {
      mapping.emplace_back(i, col);
      data_used[static_cast<std::size_t>(col)] = true;
    } else {
      mapping.emplace_back(i, kEpsilon);
    }
  }
  for (int j = 0; j < nd; ++j) {
    if (!data_used[static_cast<std::size_t>(j)]) mapping.emplace_back(kEpsilon, j);
  }

  GedResult result;
  result.mapping = std::move(mapping);
  result.expense = alignment_expense(query, data, result.mapping, costs);
  result.optimal = false;
  return result;
}

namespace {

struct BeamState {
  double g = 0;
  double f = 0;
  std::uint64_t used = 0;
  std::int32_t q_edges_priced = 0;
  std::int32_t d_edges_priced = 0;
  std::vector<int> prefix;  // data partner per decided query node
};

}  // namespace

GedResult beam_ged(const Graph& query, const Graph& data,
                   const CostSetting& costs, int width, BeamTrace* trace) {
  if (width < 1) throw std::invalid_argument("beam width must be >= 1");
  const int nq = query.num_nodes;
  const int nd = data.num_nodes;
  if (nd > 64) throw std::invalid_argument("search supports at most 64 data nodes");
  const auto total_q_edges = static_cast<std::int32_t>(query.edges.size());
  const auto total_d_edges = static_cast<std::int32_t>(data.edges.size());

  std::vector<int> order(static_cast<std::size_t>(nq));
  std::iota(order.begin(), order.end(), 0);
  {
    const std::vector<int> deg = query.degrees();
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return deg[static_cast<std::size_t>(a)] > deg[static_cast<std::size_t>(b)];
    });
  }

  const auto completion = [&](const BeamState& s) {
    const int unused = nd - std::popcount(s.used);
    return static_cast<double>(unused) * costs.node_ins +
           static_cast<double>(total_d_edges - s.d_edges_priced) * costs.edge_ins;
  };

  const auto bound = [&](const BeamState& s, int depth) {
    Remainder qr, dr;
    for (int k = depth; k < nq; ++k) {
      qr.labels.push_back(
          query.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])]);
    }
    for (int v = 0; v < nd; ++v) {
      if (!(s.used >> v & 1)) {
        dr.labels.push_back(data.labels[static_cast<std::size_t>(v)]);
      }
    }
    qr.edge_count = total_q_edges - s.q_edges_priced;
    dr.edge_count = total_d_edges - s.d_edges_priced;
    return lower_bound(qr, dr, costs);
  };

  std::vector<BeamState> retained(1);
  if (trace) trace->levels.clear();

  for (int depth = 0; depth < nq; ++depth) {
    const int u = order[static_cast<std::size_t>(depth)];
    const int q_label = query.labels[static_cast<std::size_t>(u)];

    // Pool key (parent rank, f, partner) makes retained prefixes nest as the
    // width grows: a wider beam appends candidates after everything a
    // narrower beam could keep, never between.
    struct Candidate {
      int parent_rank;
      double f;
      int partner_key;
      BeamState state;
    };
    std::vector<Candidate> pool;

    for (int rank = 0; rank < static_cast<int>(retained.size()); ++rank) {
      const BeamState& parent = retained[static_cast<std::size_t>(rank)];
      const auto extend = [&](int v) {
        BeamState child = parent;
        child.prefix.push_back(v);
        double delta = 0;
        std::int32_t d_priced = 0;
        std::int32_t q_priced = 0;
        for (int k = 0; k < depth; ++k) {
          const int w = order[static_cast<std::size_t>(k)];
          const bool q_edge = query.has_edge(u, w);
          if (q_edge) ++q_priced;
          const int iw = parent.prefix[static_cast<std::size_t>(k)];
          const bool d_edge =
              v != kEpsilon && iw != kEpsilon && data.has_edge(v, iw);
          if (q_edge && !d_edge) delta += costs.edge_del;
          if (!q_edge && d_edge) delta += costs.edge_ins;
          if (d_edge) ++d_priced;
        }
        if (v == kEpsilon) {
          delta += costs.node_del;
        } else {
          delta += q_label == data.labels[static_cast<std::size_t>(v)]
                       ? 0
                       : costs.node_sub;
          child.used |= std::uint64_t{1} << v;
        }
        child.g += delta;
        child.q_edges_priced += q_priced;
        child.d_edges_priced += d_priced;
        if (depth + 1 == nq) {
          child.g += completion(child);
          child.f = child.g;
        } else {
          child.f = child.g + bound(child, depth + 1);
        }
        pool.push_back(
            {rank, child.f, v == kEpsilon ? nd : v, std::move(child)});
      };
      for (int v = 0; v < nd; ++v) {
        if (!(parent.used >> v & 1)) extend(v);
      }
      extend(kEpsilon);
    }

    std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
      if (a.parent_rank != b.parent_rank) return a.parent_rank < b.parent_rank;
      if (a.f != b.f) return a.f < b.f;
      return a.partner_key < b.partner_key;
    });
    const std::size_t keep = std::min<std::size_t>(
        static_cast<std::size_t>(width), pool.size());
    retained.clear();
    for (std::size_t i = 0; i < keep; ++i) {
      retained.push_back(std::move(pool[i].state));
    }
    if (trace) {
      std::vector<std::vector<int>> level;
      for (const BeamState& s : retained) level.push_back(s.prefix);
      trace->levels.push_back(std::move(level));
    }
  }

  // Empty query: the lone root state just absorbs the whole data graph.
  if (nq == 0) {
    retained[0].g = completion(retained[0]);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < retained.size(); ++i) {
    if (retained[i].g < retained[best].g) best = i;
  }
  const BeamState& winner = retained[best];

  GedResult result;
  result.expense = winner.g;
  std::uint64_t used = 0;
  std::vector<int> image(static_cast<std::size_t>(nq), kEpsilon);
  for (int k = 0; k < nq; ++k) {
    image[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] =
        winner.prefix[static_cast<std::size_t>(k)];
  }
  for (int i = 0; i < nq; ++i) {
    result.mapping.emplace_back(i, image[static_cast<std::size_t>(i)]);
    if (image[static_cast<std::size_t>(i)] != kEpsilon) {
      used |= std::uint64_t{1} << image[static_cast<std::size_t>(i)];
    }
  }
  for (int v = 0; v < nd; ++v) {
    if (!(used >> v & 1)) result.mapping.emplace_back(kEpsilon, v);
  }
  result.optimal = false;
  return result;
}

}  // namespace ged
