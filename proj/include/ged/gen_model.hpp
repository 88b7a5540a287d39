#ifndef GED_GEN_MODEL_HPP
#define GED_GEN_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ged/checkpoint.hpp"
#include "ged/gen_config.hpp"
#include "ged/graph.hpp"
#include "ged/tape.hpp"

namespace ged {

// Learnable tensors in a fixed order (the order gradients and optimizer
// moments are indexed by). Two-layer blocks are named <block>.w1/.b1/.w2/.b2;
// the readout is out.w/out.b. When wo_dependencies is set the propagation and
// residual blocks do not exist.
struct GenParams {
  GenConfig config;
  std::vector<NamedTensor> tensors;

  Tensor& get(const std::string& name);
  const Tensor& get(const std::string& name) const;

  // Glorot-uniform weights, zero biases, drawn in tensor order from the seed.
  static GenParams init(const GenConfig& config, std::uint64_t seed);
};

void save_model(const std::string& path, const GenParams& params);
GenParams load_model(const std::string& path);

// Handles into a recorded prediction, for reading activations or wiring the
// loss. Pair rows are ordered (q * n + d) over the padded size n.
struct GenForward {
  NodeId prediction = -1;   // 1x1
  NodeId embed_q = -1;      // n x (alphabet + embed_dim), zero rows padded on
  NodeId embed_d = -1;
  NodeId expense = -1;      // n^2 x embed_dim, per-pair expense estimates
  NodeId guidance = -1;     // n^2 x embed_dim, after the column softmax
  NodeId guide_q = -1;      // n x embed_dim, guidance mass per query node
  NodeId guide_d = -1;
  NodeId weights = -1;      // n^2 x embed_dim
  std::vector<NodeId> params;  // leaf per tensor, in GenParams order
  int padded = 0;
};

// Records the full prediction onto the tape. Both graphs are encoded at
// their own size, then zero-padded to the larger one; every ordered node
// pair gets an expense estimate, the column softmax turns those into
// alignment guidance, and guidance-derived weights pool the expenses into
// the final scalar. Throws if a node label falls outside config.alphabet.
GenForward gen_forward(Tape& tape, const GenParams& params,
                       const GraphPair& pair);

double gen_predict(const GenParams& params, const GraphPair& pair);

// Corpus indices sorted by predicted expense against the query (ascending,
// ties by index).
std::vector<int> rank_with_model(const GenParams& params, const Graph& query,
                                 const std::vector<Graph>& corpus,
                                 const CostSetting& costs);

}  // namespace ged

#endif
