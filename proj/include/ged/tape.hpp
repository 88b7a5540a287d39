#ifndef GED_TAPE_HPP
#define GED_TAPE_HPP

#include <cstdint>
#include <vector>

#include "ged/tensor.hpp"

namespace ged {

using NodeId = std::int32_t;

// Reverse-mode differentiation tape.
//
// Every operation records a node holding its result; backward() walks the
// nodes in reverse creation order with fixed inner loop order, so gradients
// are bitwise reproducible run to run. Each forward result is checked for
// NaN/Inf and the offending operation is named in the error.
//
// Gradients flow only into nodes reachable from a leaf; constants are
// skipped. relu takes the zero subgradient at the kink. layer_norm is
// row-wise with epsilon 1e-5 and no learned affine part. softmax_per_column
// normalises each column over all rows (max-subtracted).
class Tape {
 public:
  // Inputs the loss will not be differentiated against.
  NodeId constant(Tensor value);
  // Inputs backward() produces gradients for.
  NodeId leaf(Tensor value);

  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);  // elementwise
  NodeId matmul(NodeId a, NodeId b);
  NodeId concat_cols(NodeId a, NodeId b);
  // out.row[i] = in.row[rows[i]]; adjoint scatter-adds in ascending i.
  NodeId row_select(NodeId a, std::vector<int> rows);
  // out.row[g] = sum of in rows with segment[i] == g, added in ascending i.
  NodeId segment_sum(NodeId a, std::vector<int> segment, int num_segments);
  NodeId relu(NodeId a);
  NodeId layer_norm(NodeId a);
  NodeId softmax_per_column(NodeId a);
  NodeId mean_rows(NodeId a);   // 1 x cols
  NodeId sum_all(NodeId a);     // 1 x 1
  NodeId scale(NodeId a, double factor);
  // Broadcast-add a 1 x cols bias to every row.
  NodeId add_row(NodeId a, NodeId bias);
  // Extend to total_rows rows; the new rows are zero.
  NodeId pad_rows(NodeId a, int total_rows);
  // Elementwise Huber loss between two same-shape nodes.
  NodeId huber(NodeId pred, NodeId target, double delta);

  const Tensor& value(NodeId id) const;
  std::size_t node_count() const { return nodes_.size(); }

  // Gradient of a 1x1 loss with respect to every node; entries for constants
  // and unreached nodes stay empty.
  std::vector<Tensor> backward(NodeId loss) const;

 private:
  enum class Op {
    kConstant, kLeaf, kAdd, kSub, kMul, kMatMul, kConcatCols, kRowSelect,
    kSegmentSum, kRelu, kLayerNorm, kSoftmaxCol, kMeanRows, kSumAll, kScale,
    kAddRow, kPadRows, kHuber,
  };

  struct Node {
    Op op;
    NodeId a = -1;
    NodeId b = -1;
    Tensor value;
    std::vector<int> index;  // row_select targets / segment ids
    double scalar = 0;       // scale factor / huber delta
    bool needs_grad = false;
  };

  NodeId push(Node node, const char* op_name);
  const Node& node(NodeId id) const;
  bool wants(NodeId id) const { return id >= 0 && nodes_[static_cast<std::size_t>(id)].needs_grad; }

  std::vector<Node> nodes_;
};

}  // namespace ged

#endif
