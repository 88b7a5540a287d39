#include "ged/gen_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ged/rng.hpp"

namespace ged {
namespace {

Tensor glorot(int rows, int cols, Rng& rng) {
  Tensor t(rows, cols);
  const double limit = std::sqrt(6.0 / (rows + cols));
  for (double& v : t.data) v = (rng.real() * 2.0 - 1.0) * limit;
  return t;
}

void push_block(std::vector<NamedTensor>& out, const std::string& name, int in,
                int hidden, int dim_out, Rng& rng) {
  out.push_back({name + ".w1", glorot(in, hidden, rng)});
  out.push_back({name + ".b1", Tensor(1, hidden)});
  out.push_back({name + ".w2", glorot(hidden, dim_out, rng)});
  out.push_back({name + ".b2", Tensor(1, dim_out)});
}

}  // namespace

Tensor& GenParams::get(const std::string& name) {
  for (NamedTensor& t : tensors) {
    if (t.name == name) return t.value;
  }
  throw std::out_of_range("no parameter named " + name);
}

const Tensor& GenParams::get(const std::string& name) const {
  for (const NamedTensor& t : tensors) {
    if (t.name == name) return t.value;
  }
  throw std::out_of_range("no parameter named " + name);
}

GenParams GenParams::init(const GenConfig& config, std::uint64_t seed) {
  {
    const auto problems = validate(config);
    if (!problems.empty()) {
      throw std::invalid_argument("bad config: " + problems.front());
    }
  }
  Rng rng(seed);
  GenParams p;
  p.config = config;
  const int x = config.alphabet;
  const int hid = config.gnn_hidden;
  const int emb = config.embed_dim;

  for (int l = 0; l < config.gnn_layers; ++l) {
    push_block(p.tensors, "gin" + std::to_string(l), l == 0 ? x : hid, hid,
               hid, rng);
  }
  push_block(p.tensors, "proj", hid, hid, emb, rng);
  // Expense estimator input: cost five-vector next to the embedding gap.
  push_block(p.tensors, "est", 5 + x + emb, hid, emb, rng);
  if (!config.wo_dependencies) {
    push_block(p.tensors, "prop", emb, hid, emb, rng);
    push_block(p.tensors, "res", emb + x + emb, hid, emb, rng);
  }
  push_block(p.tensors, "wgt", config.wo_dependencies ? emb : 2 * emb, hid,
             emb, rng);
  p.tensors.push_back({"out.w", glorot(emb, 1, rng)});
  p.tensors.push_back({"out.b", Tensor(1, 1)});
  return p;
}

void save_model(const std::string& path, const GenParams& params) {
  Checkpoint ckpt;
  ckpt.meta = config_to_json(params.config);
  ckpt.arrays = params.tensors;
  save_checkpoint(path, ckpt);
}

GenParams load_model(const std::string& path) {
  const Checkpoint ckpt = load_checkpoint(path);
  GenParams params;
  try {
    params.config = config_from_json(ckpt.meta);
  } catch (const std::exception& err) {
    throw std::runtime_error(path + ": checkpoint metadata: " + err.what());
  }
  params.tensors = ckpt.arrays;

  // The file must carry exactly the tensors this config defines.
  const GenParams expected = GenParams::init(params.config, 0);
  if (expected.tensors.size() != params.tensors.size()) {
    throw std::runtime_error(path + ": checkpoint holds " +
                             std::to_string(params.tensors.size()) +
                             " arrays, config needs " +
                             std::to_string(expected.tensors.size()));
  }
  for (std::size_t i = 0; i < expected.tensors.size(); ++i) {
    const NamedTensor& want = expected.tensors[i];
    const NamedTensor& got = params.tensors[i];
    if (want.name != got.name || want.value.rows != got.value.rows ||
        want.value.cols != got.value.cols) {
      std::ostringstream msg;
      msg << path << ": array " << i << " is " << got.name << " ["
          << got.value.rows << "x" << got.value.cols << "], expected "
          << want.name << " [" << want.value.rows << "x" << want.value.cols
          << "]";
      throw std::runtime_error(msg.str());
    }
  }
  return params;
}

namespace {

struct ParamNodes {
  const GenParams* params = nullptr;
  std::vector<NodeId> ids;

  NodeId of(const std::string& name) const {
    for (std::size_t i = 0; i < params->tensors.size(); ++i) {
      if (params->tensors[i].name == name) return ids[i];
    }
    throw std::out_of_range("no parameter named " + name);
  }
};

// Two affine layers around layer_norm + relu.
NodeId mlp(Tape& tape, const ParamNodes& leaves, const std::string& block,
           NodeId in) {
  NodeId h = tape.add_row(tape.matmul(in, leaves.of(block + ".w1")),
                          leaves.of(block + ".b1"));
  h = tape.relu(tape.layer_norm(h));
  return tape.add_row(tape.matmul(h, leaves.of(block + ".w2")),
                      leaves.of(block + ".b2"));
}

Tensor one_hot_labels(const Graph& g, int alphabet) {
  Tensor x(g.num_nodes, alphabet);
  for (int v = 0; v < g.num_nodes; ++v) {
    const int label = g.labels[static_cast<std::size_t>(v)];
    if (label < 0 || label >= alphabet) {
      std::ostringstream msg;
      msg << "node " << v << " has label " << label
          << " outside the configured alphabet of " << alphabet;
      throw std::invalid_argument(msg.str());
    }
    x.at(v, label) = 1;
  }
  return x;
}

Tensor self_loop_adjacency(const Graph& g, int padded) {
  Tensor a(padded, padded);
  for (int v = 0; v < padded; ++v) a.at(v, v) = 1;
  for (const auto& [u, v] : g.edges) {
    a.at(u, v) = 1;
    a.at(v, u) = 1;
  }
  return a;
}

// Message-passing encoder over the graph's own size, then the projection
// head; returns the label one-hot next to the projected embedding.
NodeId encode(Tape& tape, const ParamNodes& leaves, const GenConfig& config,
              const Graph& g) {
  const NodeId x0 = tape.constant(one_hot_labels(g, config.alphabet));
  const NodeId ahat = tape.constant(self_loop_adjacency(g, g.num_nodes));
  NodeId x = x0;
  for (int l = 0; l < config.gnn_layers; ++l) {
    x = mlp(tape, leaves, "gin" + std::to_string(l), tape.matmul(ahat, x));
  }
  const NodeId projected = mlp(tape, leaves, "proj", x);
  return tape.concat_cols(x0, projected);
}

}  // namespace

GenForward gen_forward(Tape& tape, const GenParams& params,
                       const GraphPair& pair) {
  const GenConfig& config = params.config;
  const int n = std::max(pair.query.num_nodes, pair.data.num_nodes);
  if (n == 0) throw std::invalid_argument("both graphs are empty");

  GenForward fwd;
  fwd.padded = n;
  ParamNodes leaves;
  leaves.params = &params;
  for (const NamedTensor& t : params.tensors) {
    leaves.ids.push_back(tape.leaf(t.value));
  }
  fwd.params = leaves.ids;

  // Encode at native size; virtual rows enter as zeros only afterwards.
  fwd.embed_q = tape.pad_rows(encode(tape, leaves, config, pair.query), n);
  fwd.embed_d = tape.pad_rows(encode(tape, leaves, config, pair.data), n);

  std::vector<int> idx_q, idx_d;
  idx_q.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  idx_d.reserve(idx_q.capacity());
  for (int q = 0; q < n; ++q) {
    for (int d = 0; d < n; ++d) {
      idx_q.push_back(q);
      idx_d.push_back(d);
    }
  }

  const NodeId gap = tape.sub(tape.row_select(fwd.embed_q, idx_q),
                              tape.row_select(fwd.embed_d, idx_d));

  Tensor cost_row(1, 5);
  if (!config.wo_cost) {
    const auto values = pair.costs.as_array();
    for (int j = 0; j < 5; ++j) cost_row.at(0, j) = values[static_cast<std::size_t>(j)];
  }
  const NodeId cost_tile = tape.row_select(
      tape.constant(std::move(cost_row)),
      std::vector<int>(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0));

  fwd.expense = mlp(tape, leaves, "est", tape.concat_cols(cost_tile, gap));
  fwd.guidance =
      config.wo_global ? fwd.expense : tape.softmax_per_column(fwd.expense);
  fwd.guide_q = tape.segment_sum(fwd.guidance, idx_q, n);
  fwd.guide_d = tape.segment_sum(fwd.guidance, idx_d, n);

  if (config.wo_dependencies) {
    fwd.weights = mlp(tape, leaves, "wgt", fwd.guidance);
  } else {
    const auto side_summary = [&](NodeId guide, const Graph& g, NodeId embed) {
      NodeId base = guide;
      if (!config.wo_intra_graph) {
        base = tape.matmul(tape.constant(self_loop_adjacency(g, n)), guide);
      }
      const NodeId mixed = mlp(tape, leaves, "prop", base);
      return mlp(tape, leaves, "res", tape.concat_cols(mixed, embed));
    };
    const NodeId sum_q = side_summary(fwd.guide_q, pair.query, fwd.embed_q);
    const NodeId sum_d = side_summary(fwd.guide_d, pair.data, fwd.embed_d);
    fwd.weights = mlp(tape, leaves, "wgt",
                      tape.concat_cols(tape.row_select(sum_q, idx_q),
                                       tape.row_select(sum_d, idx_d)));
  }

  const NodeId weighted = tape.mul(fwd.weights, fwd.expense);
  const NodeId per_q = tape.segment_sum(weighted, idx_q, n);
  const NodeId per_d = tape.segment_sum(weighted, idx_d, n);
  const std::vector<int> all_one_segment(static_cast<std::size_t>(n), 0);
  const NodeId total_q = tape.segment_sum(per_q, all_one_segment, 1);
  const NodeId total_d = tape.segment_sum(per_d, all_one_segment, 1);
  const NodeId pooled = tape.scale(tape.add(total_q, total_d), 0.5);

  fwd.prediction = tape.add(tape.matmul(pooled, leaves.of("out.w")),
                            leaves.of("out.b"));
  return fwd;
}

double gen_predict(const GenParams& params, const GraphPair& pair) {
  Tape tape;
  const GenForward fwd = gen_forward(tape, params, pair);
  return tape.value(fwd.prediction).data[0];
}

std::vector<int> rank_with_model(const GenParams& params, const Graph& query,
                                 const std::vector<Graph>& corpus,
                                 const CostSetting& costs) {
  std::vector<double> scores;
  scores.reserve(corpus.size());
  for (const Graph& candidate : corpus) {
    GraphPair pair;
    pair.query = query;
    pair.data = candidate;
    pair.costs = costs;
    scores.push_back(gen_predict(params, pair));
  }
  std::vector<int> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return scores[static_cast<std::size_t>(a)] < scores[static_cast<std::size_t>(b)];
  });
  return order;
}

}  // namespace ged
