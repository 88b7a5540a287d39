#include "ged/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace ged {
namespace {

[[noreturn]] void bad_mapping(const std::string& what) {
  throw std::invalid_argument("malformed mapping: " + what);
}

}  // namespace

double alignment_expense(const Graph& query, const Graph& data,
                         const Mapping& mapping, const CostSetting& costs) {
  const int nq = query.num_nodes;
  const int nd = data.num_nodes;
  std::vector<int> image(static_cast<std::size_t>(nq), kEpsilon);
  std::vector<int> preimage(static_cast<std::size_t>(nd), kEpsilon);
  std::vector<bool> q_seen(static_cast<std::size_t>(nq), false);
  std::vector<bool> d_seen(static_cast<std::size_t>(nd), false);

  double expense = 0;
  for (const auto& [qn, dn] : mapping) {
    if (qn == kEpsilon && dn == kEpsilon) bad_mapping("(eps, eps) entry");
    if (qn != kEpsilon) {
      if (qn < 0 || qn >= nq) bad_mapping("query node out of range");
      if (q_seen[static_cast<std::size_t>(qn)]) bad_mapping("query node repeated");
      q_seen[static_cast<std::size_t>(qn)] = true;
    }
    if (dn != kEpsilon) {
      if (dn < 0 || dn >= nd) bad_mapping("data node out of range");
      if (d_seen[static_cast<std::size_t>(dn)]) bad_mapping("data node repeated");
      d_seen[static_cast<std::size_t>(dn)] = true;
    }
    if (qn != kEpsilon && dn != kEpsilon) {
      image[static_cast<std::size_t>(qn)] = dn;
      preimage[static_cast<std::size_t>(dn)] = qn;
      if (query.labels[static_cast<std::size_t>(qn)] !=
          data.labels[static_cast<std::size_t>(dn)]) {
        expense += costs.node_sub;
      }
    } else if (qn != kEpsilon) {
      expense += costs.node_del;
    } else {
      expense += costs.node_ins;
    }
  }
  for (int i = 0; i < nq; ++i) {
    if (!q_seen[static_cast<std::size_t>(i)]) bad_mapping("query node missing");
  }
  for (int j = 0; j < nd; ++j) {
    if (!d_seen[static_cast<std::size_t>(j)]) bad_mapping("data node missing");
  }

  for (const auto& [u, v] : query.edges) {
    const int iu = image[static_cast<std::size_t>(u)];
    const int iv = image[static_cast<std::size_t>(v)];
    const bool carried = iu != kEpsilon && iv != kEpsilon && data.has_edge(iu, iv);
    if (!carried) expense += costs.edge_del;
  }
  for (const auto& [a, b] : data.edges) {
    const int pa = preimage[static_cast<std::size_t>(a)];
    const int pb = preimage[static_cast<std::size_t>(b)];
    const bool carried = pa != kEpsilon && pb != kEpsilon && query.has_edge(pa, pb);
    if (!carried) expense += costs.edge_ins;
  }
  return expense;
}

GedResult brute_force_ged(const Graph& query, const Graph& data,
                          const CostSetting& costs) {
  const int nq = query.num_nodes;
  const int nd = data.num_nodes;
  const int n = std::max(nq, nd);
  if (n > 8) {
    throw std::invalid_argument("brute force is limited to 8 nodes per side");
  }

  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);

  GedResult best;
  best.expense = std::numeric_limits<double>::infinity();
  Mapping mapping;
  do {
    mapping.clear();
    for (int i = 0; i < n; ++i) {
      const int qn = i < nq ? i : kEpsilon;
      const int dn = perm[static_cast<std::size_t>(i)] < nd
                         ? perm[static_cast<std::size_t>(i)]
                         : kEpsilon;
      if (qn == kEpsilon && dn == kEpsilon) continue;
      mapping.emplace_back(qn, dn);
    }
    const double expense = alignment_expense(query, data, mapping, costs);
    if (expense < best.expense) {
      best.expense = expense;
      best.mapping = mapping;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  best.optimal = true;
  return best;
}

double lower_bound(const Remainder& query_side, const Remainder& data_side,
                   const CostSetting& costs) {
  std::unordered_map<int, std::int64_t> pool;
  for (int label : query_side.labels) ++pool[label];
  std::int64_t common = 0;
  for (int label : data_side.labels) {
    auto it = pool.find(label);
    if (it != pool.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  const auto mq = static_cast<std::int64_t>(query_side.labels.size());
  const auto md = static_cast<std::int64_t>(data_side.labels.size());
  const std::int64_t matched = std::min(mq, md);

  // A matched pair with unequal labels costs at least min(sub, del + ins);
  // unmatched surplus nodes pay deletion or insertion outright.
  const double mismatch_floor =
      std::min(costs.node_sub, costs.node_del + costs.node_ins);
  const double node_part =
      static_cast<double>(std::max<std::int64_t>(0, matched - common)) * mismatch_floor +
      static_cast<double>(mq - matched) * costs.node_del +
      static_cast<double>(md - matched) * costs.node_ins;

  const std::int64_t eq = query_side.edge_count;
  const std::int64_t ed = data_side.edge_count;
  const double edge_part =
      static_cast<double>(std::max<std::int64_t>(0, eq - ed)) * costs.edge_del +
      static_cast<double>(std::max<std::int64_t>(0, ed - eq)) * costs.edge_ins;
  return node_part + edge_part;
}

namespace {

struct SearchState {
  double f = 0;
  double g = 0;
  double h = 0;
  std::uint64_t used = 0;  // bitmask of consumed data nodes
  std::int32_t trail = -1;
  std::int32_t depth = 0;
  std::int32_t q_edges_priced = 0;
  std::int32_t d_edges_priced = 0;
  std::uint64_t seq = 0;
};

// Pop order: lowest f, then lowest h, then deepest, then generation order.
struct StateAfter {
  bool operator()(const SearchState& a, const SearchState& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.h != b.h) return a.h > b.h;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.seq > b.seq;
  }
};

struct TrailEntry {
  std::int32_t parent = -1;
  std::int16_t value = kEpsilon;  // data node assigned at this step
};

// Query nodes are decided high-degree first so branching commits the most
// constrained choices early; index breaks ties.
std::vector<int> visit_order(const Graph& g) {
  std::vector<int> order(static_cast<std::size_t>(g.num_nodes));
  std::iota(order.begin(), order.end(), 0);
  const std::vector<int> deg = g.degrees();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return deg[static_cast<std::size_t>(a)] > deg[static_cast<std::size_t>(b)];
  });
  return order;
}

std::vector<std::uint64_t> adjacency_masks(const Graph& g) {
  std::vector<std::uint64_t> mask(static_cast<std::size_t>(g.num_nodes), 0);
  for (const auto& [u, v] : g.edges) {
    mask[static_cast<std::size_t>(u)] |= std::uint64_t{1} << v;
    mask[static_cast<std::size_t>(v)] |= std::uint64_t{1} << u;
  }
  return mask;
}

}  // namespace

GedResult astar_ged(const Graph& query, const Graph& data,
                    const CostSetting& costs, std::size_t node_budget,
                    AstarStats* stats) {
  const int nq = query.num_nodes;
  const int nd = data.num_nodes;
  if (nd > 64) throw std::invalid_argument("search supports at most 64 data nodes");
  const auto total_q_edges = static_cast<std::int32_t>(query.edges.size());
  const auto total_d_edges = static_cast<std::int32_t>(data.edges.size());

  const std::vector<int> order = visit_order(query);
  const std::vector<std::uint64_t> qadj = adjacency_masks(query);
  const std::vector<std::uint64_t> dadj = adjacency_masks(data);

  // decided_mask[k] = query nodes decided after k steps
  std::vector<std::uint64_t> decided_mask(static_cast<std::size_t>(nq) + 1, 0);
  for (int k = 0; k < nq; ++k) {
    decided_mask[static_cast<std::size_t>(k) + 1] =
        decided_mask[static_cast<std::size_t>(k)] |
        (std::uint64_t{1} << order[static_cast<std::size_t>(k)]);
  }

  std::vector<TrailEntry> trail;
  std::priority_queue<SearchState, std::vector<SearchState>, StateAfter> open;
  AstarStats local;
  std::uint64_t next_seq = 0;

  const auto all_d_inserted = [&](const SearchState& s) {
    // Batch-insert every unused data node and all unpriced data edges.
    const int unused = nd - std::popcount(s.used);
    return static_cast<double>(unused) * costs.node_ins +
           static_cast<double>(total_d_edges - s.d_edges_priced) * costs.edge_ins;
  };

  const auto make_remainders = [&](const SearchState& s, Remainder& qr,
                                   Remainder& dr) {
    qr.labels.clear();
    dr.labels.clear();
    for (int k = s.depth; k < nq; ++k) {
      qr.labels.push_back(query.labels[static_cast<std::size_t>(
          order[static_cast<std::size_t>(k)])]);
    }
    for (int v = 0; v < nd; ++v) {
      if (!(s.used >> v & 1)) dr.labels.push_back(data.labels[static_cast<std::size_t>(v)]);
    }
    qr.edge_count = total_q_edges - s.q_edges_priced;
    dr.edge_count = total_d_edges - s.d_edges_priced;
  };

  SearchState root;
  {
    Remainder qr, dr;
    make_remainders(root, qr, dr);
    root.h = lower_bound(qr, dr, costs);
    if (nq == 0) {
      root.g = all_d_inserted(root);
      root.h = 0;
    }
    root.f = root.g + root.h;
    root.seq = next_seq++;
    open.push(root);
    ++local.generated;
  }

  double best_complete = std::numeric_limits<double>::infinity();
  SearchState best_leaf;
  bool have_leaf = false;
  const auto rebuild_mapping = [&](const SearchState& s) {
    std::vector<int> image(static_cast<std::size_t>(nq), kEpsilon);
    std::int32_t node = s.trail;
    for (int k = s.depth - 1; k >= 0; --k) {
      image[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] =
          trail[static_cast<std::size_t>(node)].value;
      node = trail[static_cast<std::size_t>(node)].parent;
    }
    Mapping mapping;
    std::uint64_t used = 0;
    for (int u = 0; u < nq; ++u) {
      mapping.emplace_back(u, image[static_cast<std::size_t>(u)]);
      if (image[static_cast<std::size_t>(u)] != kEpsilon) {
        used |= std::uint64_t{1} << image[static_cast<std::size_t>(u)];
      }
    }
    for (int v = 0; v < nd; ++v) {
      if (!(used >> v & 1)) mapping.emplace_back(kEpsilon, v);
    }
    return mapping;
  };

  // Finishes a partial state by deleting everything still undecided; used as
  // the fallback answer when the budget runs out.
  const auto bail_out = [&](SearchState s) {
    const int remaining = nq - s.depth;
    s.g += static_cast<double>(remaining) * costs.node_del +
           static_cast<double>(total_q_edges - s.q_edges_priced) * costs.edge_del +
           all_d_inserted(s);
    for (int k = 0; k < remaining; ++k) {
      trail.push_back({s.trail, static_cast<std::int16_t>(kEpsilon)});
      s.trail = static_cast<std::int32_t>(trail.size()) - 1;
      ++s.depth;
    }
    GedResult result;
    result.expense = s.g;
    result.mapping = rebuild_mapping(s);
    result.optimal = false;
    return result;
  };

  std::vector<std::int64_t> label_count_q, label_count_d;
  std::unordered_map<int, std::size_t> label_id;
  for (const Graph* g : {&query, &data}) {
    for (int label : g->labels) {
      label_id.emplace(label, label_id.size());
    }
  }
  const std::size_t num_labels = label_id.size();

  std::vector<int> image(static_cast<std::size_t>(nq), kEpsilon);
  GedResult result;
  while (!open.empty()) {
    SearchState current = open.top();
    open.pop();
    if (current.depth == nq) {
      result.expense = current.g;
      result.mapping = rebuild_mapping(current);
      result.optimal = true;
      if (stats) *stats = local;
      return result;
    }
    if (local.expanded >= node_budget) {
      local.budget_exhausted = true;
      result = bail_out(current);
      if (have_leaf && best_leaf.g <= result.expense) {
        result.expense = best_leaf.g;
        result.mapping = rebuild_mapping(best_leaf);
        result.optimal = false;
      }
      if (stats) *stats = local;
      return result;
    }
    ++local.expanded;

    // Recover the decided images once per expansion.
    {
      std::int32_t node = current.trail;
      for (int k = current.depth - 1; k >= 0; --k) {
        image[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] =
            trail[static_cast<std::size_t>(node)].value;
        node = trail[static_cast<std::size_t>(node)].parent;
      }
    }

    // Remaining label multisets of the parent; children adjust a copy.
    label_count_q.assign(num_labels, 0);
    label_count_d.assign(num_labels, 0);
    for (int k = current.depth; k < nq; ++k) {
      ++label_count_q[label_id[query.labels[static_cast<std::size_t>(
          order[static_cast<std::size_t>(k)])]]];
    }
    for (int v = 0; v < nd; ++v) {
      if (!(current.used >> v & 1)) {
        ++label_count_d[label_id[data.labels[static_cast<std::size_t>(v)]]];
      }
    }

    const int u = order[static_cast<std::size_t>(current.depth)];
    const std::uint64_t decided = decided_mask[static_cast<std::size_t>(current.depth)];
    const int q_label = query.labels[static_cast<std::size_t>(u)];

    const auto push_child = [&](int v) {
      SearchState child = current;
      child.depth = current.depth + 1;
      child.seq = next_seq++;

      double delta = 0;
      std::int32_t q_priced = std::popcount(qadj[static_cast<std::size_t>(u)] & decided);
      std::int32_t d_priced = 0;
      if (v == kEpsilon) {
        delta += costs.node_del;
        delta += static_cast<double>(q_priced) * costs.edge_del;
      } else {
        delta += q_label == data.labels[static_cast<std::size_t>(v)] ? 0 : costs.node_sub;
        child.used |= std::uint64_t{1} << v;
        for (int k = 0; k < current.depth; ++k) {
          const int w = order[static_cast<std::size_t>(k)];
          const int iw = image[static_cast<std::size_t>(w)];
          const bool q_edge = qadj[static_cast<std::size_t>(u)] >> w & 1;
          const bool d_edge = iw != kEpsilon && (dadj[static_cast<std::size_t>(v)] >> iw & 1);
          if (q_edge && !d_edge) delta += costs.edge_del;
          if (!q_edge && d_edge) delta += costs.edge_ins;
          if (d_edge) ++d_priced;
        }
      }
      child.q_edges_priced += q_priced;
      child.d_edges_priced += d_priced;
      child.g += delta;

      // Child label remainders differ from the parent's by one entry per side.
      const std::size_t lu = label_id[q_label];
      --label_count_q[lu];
      std::size_t lv = 0;
      if (v != kEpsilon) {
        lv = label_id[data.labels[static_cast<std::size_t>(v)]];
        --label_count_d[lv];
      }
      if (child.depth == nq) {
        child.g += all_d_inserted(child);
        child.h = 0;
      } else {
        std::int64_t common = 0, mq = 0, md = 0;
        for (std::size_t l = 0; l < num_labels; ++l) {
          common += std::min(label_count_q[l], label_count_d[l]);
          mq += label_count_q[l];
          md += label_count_d[l];
        }
        const std::int64_t matched = std::min(mq, md);
        const double mismatch_floor =
            std::min(costs.node_sub, costs.node_del + costs.node_ins);
        const std::int64_t eq = total_q_edges - child.q_edges_priced;
        const std::int64_t ed = total_d_edges - child.d_edges_priced;
        child.h =
            static_cast<double>(std::max<std::int64_t>(0, matched - common)) * mismatch_floor +
            static_cast<double>(mq - matched) * costs.node_del +
            static_cast<double>(md - matched) * costs.node_ins +
            static_cast<double>(std::max<std::int64_t>(0, eq - ed)) * costs.edge_del +
            static_cast<double>(std::max<std::int64_t>(0, ed - eq)) * costs.edge_ins;
      }
      ++label_count_q[lu];
      if (v != kEpsilon) ++label_count_d[lv];

      child.f = child.g + child.h;
      if (child.f > best_complete) return;  // cannot beat a known alignment

      trail.push_back({current.trail, static_cast<std::int16_t>(v)});
      child.trail = static_cast<std::int32_t>(trail.size()) - 1;
      if (child.depth == nq && child.g < best_complete) {
        best_complete = child.g;
        best_leaf = child;
        have_leaf = true;
      }
      open.push(child);
      ++local.generated;
    };

    for (int v = 0; v < nd; ++v) {
      if (!(current.used >> v & 1)) push_child(v);
    }
    push_child(kEpsilon);
  }

  throw std::logic_error("search frontier exhausted without a goal");
}

}  // namespace ged
