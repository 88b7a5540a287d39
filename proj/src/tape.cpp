#include "ged/tape.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ged {
namespace {

constexpr double kLayerNormEps = 1e-5;

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  std::ostringstream msg;
  msg << op << ": incompatible shapes " << a.rows << "x" << a.cols << " and "
      << b.rows << "x" << b.cols;
  throw std::invalid_argument(msg.str());
}

void accumulate(Tensor& grad, const Tensor& shape_like) {
  if (grad.data.empty()) grad = Tensor(shape_like.rows, shape_like.cols);
}

}  // namespace

NodeId Tape::push(Node node, const char* op_name) {
  for (double v : node.value.data) {
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << op_name << " produced a non-finite value at node "
          << nodes_.size();
      throw std::runtime_error(msg.str());
    }
  }
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size()) - 1;
}

const Tape::Node& Tape::node(NodeId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) {
    throw std::out_of_range("tape node id out of range");
  }
  return nodes_[static_cast<std::size_t>(id)];
}

const Tensor& Tape::value(NodeId id) const { return node(id).value; }

NodeId Tape::constant(Tensor value) {
  Node n;
  n.op = Op::kConstant;
  n.value = std::move(value);
  return push(std::move(n), "constant");
}

NodeId Tape::leaf(Tensor value) {
  Node n;
  n.op = Op::kLeaf;
  n.value = std::move(value);
  n.needs_grad = true;
  return push(std::move(n), "leaf");
}

NodeId Tape::add(NodeId a, NodeId b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (!ta.same_shape(tb)) shape_error("add", ta, tb);
  Node n;
  n.op = Op::kAdd;
  n.a = a;
  n.b = b;
  n.value = ta;
  for (std::size_t i = 0; i < tb.data.size(); ++i) n.value.data[i] += tb.data[i];
  n.needs_grad = wants(a) || wants(b);
  return push(std::move(n), "add");
}

NodeId Tape::sub(NodeId a, NodeId b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (!ta.same_shape(tb)) shape_error("sub", ta, tb);
  Node n;
  n.op = Op::kSub;
  n.a = a;
  n.b = b;
  n.value = ta;
  for (std::size_t i = 0; i < tb.data.size(); ++i) n.value.data[i] -= tb.data[i];
  n.needs_grad = wants(a) || wants(b);
  return push(std::move(n), "sub");
}

NodeId Tape::mul(NodeId a, NodeId b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (!ta.same_shape(tb)) shape_error("mul", ta, tb);
  Node n;
  n.op = Op::kMul;
  n.a = a;
  n.b = b;
  n.value = ta;
  for (std::size_t i = 0; i < tb.data.size(); ++i) n.value.data[i] *= tb.data[i];
  n.needs_grad = wants(a) || wants(b);
  return push(std::move(n), "mul");
}

NodeId Tape::matmul(NodeId a, NodeId b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (ta.cols != tb.rows) shape_error("matmul", ta, tb);
  Node n;
  n.op = Op::kMatMul;
  n.a = a;
  n.b = b;
  n.value = Tensor(ta.rows, tb.cols);
  const double* pa = ta.data.data();
  const double* pb = tb.data.data();
  double* po = n.value.data.data();
  for (int i = 0; i < ta.rows; ++i) {
    for (int k = 0; k < ta.cols; ++k) {
      const double aik = pa[static_cast<std::size_t>(i) * ta.cols + k];
      if (aik == 0) continue;
      const double* brow = pb + static_cast<std::size_t>(k) * tb.cols;
      double* orow = po + static_cast<std::size_t>(i) * tb.cols;
      for (int j = 0; j < tb.cols; ++j) orow[j] += aik * brow[j];
    }
  }
  n.needs_grad = wants(a) || wants(b);
  return push(std::move(n), "matmul");
}

NodeId Tape::concat_cols(NodeId a, NodeId b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (ta.rows != tb.rows) shape_error("concat_cols", ta, tb);
  Node n;
  n.op = Op::kConcatCols;
  n.a = a;
  n.b = b;
  n.value = Tensor(ta.rows, ta.cols + tb.cols);
  for (int i = 0; i < ta.rows; ++i) {
    for (int j = 0; j < ta.cols; ++j) n.value.at(i, j) = ta.at(i, j);
    for (int j = 0; j < tb.cols; ++j) n.value.at(i, ta.cols + j) = tb.at(i, j);
  }
  n.needs_grad = wants(a) || wants(b);
  return push(std::move(n), "concat_cols");
}

NodeId Tape::row_select(NodeId a, std::vector<int> rows) {
  const Tensor& ta = value(a);
  for (int r : rows) {
    if (r < 0 || r >= ta.rows) {
      throw std::invalid_argument("row_select: row index out of range");
    }
  }
  Node n;
  n.op = Op::kRowSelect;
  n.a = a;
  n.value = Tensor(static_cast<int>(rows.size()), ta.cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < ta.cols; ++j) {
      n.value.at(static_cast<int>(i), j) = ta.at(rows[i], j);
    }
  }
  n.index = std::move(rows);
  n.needs_grad = wants(a);
  return push(std::move(n), "row_select");
}

NodeId Tape::segment_sum(NodeId a, std::vector<int> segment, int num_segments) {
  const Tensor& ta = value(a);
  if (static_cast<int>(segment.size()) != ta.rows) {
    throw std::invalid_argument("segment_sum: one segment id per row required");
  }
  for (int s : segment) {
    if (s < 0 || s >= num_segments) {
      throw std::invalid_argument("segment_sum: segment id out of range");
    }
  }
  Node n;
  n.op = Op::kSegmentSum;
  n.a = a;
  n.value = Tensor(num_segments, ta.cols);
  for (int i = 0; i < ta.rows; ++i) {
    const int s = segment[static_cast<std::size_t>(i)];
    for (int j = 0; j < ta.cols; ++j) n.value.at(s, j) += ta.at(i, j);
  }
  n.index = std::move(segment);
  n.needs_grad = wants(a);
  return push(std::move(n), "segment_sum");
}

NodeId Tape::relu(NodeId a) {
  Node n;
  n.op = Op::kRelu;
  n.a = a;
  n.value = value(a);
  for (double& v : n.value.data) v = std::max(0.0, v);
  n.needs_grad = wants(a);
  return push(std::move(n), "relu");
}

NodeId Tape::layer_norm(NodeId a) {
  const Tensor& ta = value(a);
  if (ta.cols == 0) throw std::invalid_argument("layer_norm: empty rows");
  Node n;
  n.op = Op::kLayerNorm;
  n.a = a;
  n.value = Tensor(ta.rows, ta.cols);
  for (int i = 0; i < ta.rows; ++i) {
    double mean = 0;
    for (int j = 0; j < ta.cols; ++j) mean += ta.at(i, j);
    mean /= ta.cols;
    double var = 0;
    for (int j = 0; j < ta.cols; ++j) {
      const double d = ta.at(i, j) - mean;
      var += d * d;
    }
    var /= ta.cols;
    const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
    for (int j = 0; j < ta.cols; ++j) {
      n.value.at(i, j) = (ta.at(i, j) - mean) * inv;
    }
  }
  n.needs_grad = wants(a);
  return push(std::move(n), "layer_norm");
}

NodeId Tape::softmax_per_column(NodeId a) {
  const Tensor& ta = value(a);
  if (ta.rows == 0) throw std::invalid_argument("softmax_per_column: no rows");
  Node n;
  n.op = Op::kSoftmaxCol;
  n.a = a;
  n.value = Tensor(ta.rows, ta.cols);
  for (int j = 0; j < ta.cols; ++j) {
    double top = ta.at(0, j);
    for (int i = 1; i < ta.rows; ++i) top = std::max(top, ta.at(i, j));
    double denom = 0;
    for (int i = 0; i < ta.rows; ++i) {
      const double e = std::exp(ta.at(i, j) - top);
      n.value.at(i, j) = e;
      denom += e;
    }
    for (int i = 0; i < ta.rows; ++i) n.value.at(i, j) /= denom;
  }
  n.needs_grad = wants(a);
  return push(std::move(n), "softmax_per_column");
}

NodeId Tape::mean_rows(NodeId a) {
  const Tensor& ta = value(a);
  if (ta.rows == 0) throw std::invalid_argument("mean_rows: no rows");
  Node n;
  n.op = Op::kMeanRows;
  n.a = a;
  n.value = Tensor(1, ta.cols);
  for (int i = 0; i < ta.rows; ++i) {
    for (int j = 0; j < ta.cols; ++j) n.value.at(0, j) += ta.at(i, j);
  }
  for (int j = 0; j < ta.cols; ++j) n.value.at(0, j) /= ta.rows;
  n.needs_grad = wants(a);
  return push(std::move(n), "mean_rows");
}

NodeId Tape::sum_all(NodeId a) {
  const Tensor& ta = value(a);
  Node n;
  n.op = Op::kSumAll;
  n.a = a;
  n.value = Tensor(1, 1);
  for (double v : ta.data) n.value.data[0] += v;
  n.needs_grad = wants(a);
  return push(std::move(n), "sum_all");
}

NodeId Tape::scale(NodeId a, double factor) {
  Node n;
  n.op = Op::kScale;
  n.a = a;
  n.scalar = factor;
  n.value = value(a);
  for (double& v : n.value.data) v *= factor;
  n.needs_grad = wants(a);
  return push(std::move(n), "scale");
}

NodeId Tape::add_row(NodeId a, NodeId bias) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(bias);
  if (tb.rows != 1 || tb.cols != ta.cols) shape_error("add_row", ta, tb);
  Node n;
  n.op = Op::kAddRow;
  n.a = a;
  n.b = bias;
  n.value = ta;
  for (int i = 0; i < ta.rows; ++i) {
    for (int j = 0; j < ta.cols; ++j) n.value.at(i, j) += tb.at(0, j);
  }
  n.needs_grad = wants(a) || wants(bias);
  return push(std::move(n), "add_row");
}

NodeId Tape::pad_rows(NodeId a, int total_rows) {
  const Tensor& ta = value(a);
  if (total_rows < ta.rows) {
    throw std::invalid_argument("pad_rows: target has fewer rows than input");
  }
  Node n;
  n.op = Op::kPadRows;
  n.a = a;
  n.value = Tensor(total_rows, ta.cols);
  std::copy(ta.data.begin(), ta.data.end(), n.value.data.begin());
  n.needs_grad = wants(a);
  return push(std::move(n), "pad_rows");
}

NodeId Tape::huber(NodeId pred, NodeId target, double delta) {
  if (delta <= 0) throw std::invalid_argument("huber: delta must be positive");
  const Tensor& tp = value(pred);
  const Tensor& tt = value(target);
  if (!tp.same_shape(tt)) shape_error("huber", tp, tt);
  Node n;
  n.op = Op::kHuber;
  n.a = pred;
  n.b = target;
  n.scalar = delta;
  n.value = Tensor(tp.rows, tp.cols);
  for (std::size_t i = 0; i < tp.data.size(); ++i) {
    const double e = tp.data[i] - tt.data[i];
    n.value.data[i] = std::abs(e) <= delta ? 0.5 * e * e
                                           : delta * (std::abs(e) - 0.5 * delta);
  }
  n.needs_grad = wants(pred) || wants(target);
  return push(std::move(n), "huber");
}

std::vector<Tensor> Tape::backward(NodeId loss) const {
  const Node& top = node(loss);
  if (top.value.rows != 1 || top.value.cols != 1) {
    throw std::invalid_argument("backward: loss must be 1x1");
  }
  std::vector<Tensor> grad(nodes_.size());
  if (!top.needs_grad) return grad;
  grad[static_cast<std::size_t>(loss)] = Tensor::scalar(1.0);

  for (NodeId id = loss; id >= 0; --id) {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    Tensor& g = grad[static_cast<std::size_t>(id)];
    if (!n.needs_grad || g.data.empty()) continue;

    const auto ga = [&]() -> Tensor& {
      Tensor& t = grad[static_cast<std::size_t>(n.a)];
      accumulate(t, nodes_[static_cast<std::size_t>(n.a)].value);
      return t;
    };
    const auto gb = [&]() -> Tensor& {
      Tensor& t = grad[static_cast<std::size_t>(n.b)];
      accumulate(t, nodes_[static_cast<std::size_t>(n.b)].value);
      return t;
    };

    switch (n.op) {
      case Op::kConstant:
      case Op::kLeaf:
        break;
      case Op::kAdd: {
        if (wants(n.a)) {
          Tensor& t = ga();
          for (std::size_t i = 0; i < g.data.size(); ++i) t.data[i] += g.data[i];
        }
        if (wants(n.b)) {
          Tensor& t = gb();
          for (std::size_t i = 0; i < g.data.size(); ++i) t.data[i] += g.data[i];
        }
        break;
      }
      case Op::kSub: {
        if (wants(n.a)) {
          Tensor& t = ga();
          for (std::size_t i = 0; i < g.data.size(); ++i) t.data[i] += g.data[i];
        }
        if (wants(n.b)) {
          Tensor& t = gb();
          for (std::size_t i = 0; i < g.data.size(); ++i) t.data[i] -= g.data[i];
        }
        break;
      }
      case Op::kMul: {
        const Tensor& va = nodes_[static_cast<std::size_t>(n.a)].value;
        const Tensor& vb = nodes_[static_cast<std::size_t>(n.b)].value;
        if (wants(n.a)) {
          Tensor& t = ga();
          for (std::size_t i = 0; i < g.data.size(); ++i) {
            t.data[i] += g.data[i] * vb.data[i];
          }
        }
        if (wants(n.b)) {
          Tensor& t = gb();
          for (std::size_t i = 0; i < g.data.size(); ++i) {
            t.data[i] += g.data[i] * va.data[i];
          }
        }
        break;
      }
      case Op::kMatMul: {
        const Tensor& va = nodes_[static_cast<std::size_t>(n.a)].value;
        const Tensor& vb = nodes_[static_cast<std::size_t>(n.b)].value;
        if (wants(n.a)) {
          // dA[i][k] += sum_j g[i][j] * B[k][j]
          Tensor& t = ga();
          for (int i = 0; i < va.rows; ++i) {
            for (int k = 0; k < va.cols; ++k) {
              double acc = 0;
              const double* grow =
                  g.data.data() + static_cast<std::size_t>(i) * g.cols;
              const double* brow =
                  vb.data.data() + static_cast<std::size_t>(k) * vb.cols;
              for (int j = 0; j < vb.cols; ++j) acc += grow[j] * brow[j];
              t.at(i, k) += acc;
            }
          }
        }
        if (wants(n.b)) {
          // dB[k][j] += sum_i A[i][k] * g[i][j]
          Tensor& t = gb();
          for (int i = 0; i < va.rows; ++i) {
            const double* arow =
                va.data.data() + static_cast<std::size_t>(i) * va.cols;
            const double* grow =
                g.data.data() + static_cast<std::size_t>(i) * g.cols;
            for (int k = 0; k < va.cols; ++k) {
              const double aik = arow[k];
              if (aik == 0) continue;
              double* trow = t.data.data() + static_cast<std::size_t>(k) * t.cols;
              for (int j = 0; j < g.cols; ++j) trow[j] += aik * grow[j];
            }
          }
        }
        break;
      }
      case Op::kConcatCols: {
        const Tensor& va = nodes_[static_cast<std::size_t>(n.a)].value;
        const Tensor& vb = nodes_[static_cast<std::size_t>(n.b)].value;
        if (wants(n.a)) {
          Tensor& t = ga();
          for (int i = 0; i < va.rows; ++i) {
            for (int j = 0; j < va.cols; ++j) t.at(i, j) += g.at(i, j);
          }
        }
        if (wants(n.b)) {
          Tensor& t = gb();
          for (int i = 0; i < vb.rows; ++i) {
            for (int j = 0; j < vb.cols; ++j) t.at(i, j) += g.at(i, va.cols + j);
          }
        }
        break;
      }
      case Op::kRowSelect: {
        if (wants(n.a)) {
          Tensor& t = ga();
          for (std::size_t i = 0; i < n.index.size(); ++i) {
            const int src = n.index[i];
            for (int j = 0; j < g.cols; ++j) {
              t.at(src, j) += g.at(static_cast<int>(i), j);
            }
          }
        }
        break;
      }
      case Op::kSegmentSum: {
        if (wants(n.a)) {
          Tensor& t = ga();
          for (std::size_t i = 0; i < n.index.size(); ++i) {
            const int s = n.index[i];
            for (int j = 0; j < g.cols; ++j) {
              t.at(static_cast<int>(i), j) += g.at(s, j);
            }
          }
        }
        break;
      }
      case Op::kRelu: {
        if (wants(n.a)) {
          const Tensor& va = nodes_[static_cast<std::size_t>(n.a)].value;
          Tensor& t = ga();
          for (std::size_t i = 0; i < g.data.size(); ++i) {
            if (va.data[i] > 0) t.data[i] += g.data[i];
          }
        }
        break;
      }
      case Op::kLayerNorm: {
        if (wants(n.a)) {
          const Tensor& va = nodes_[static_cast<std::size_t>(n.a)].value;
          Tensor& t = ga();
          const int m = va.cols;
          for (int i = 0; i < va.rows; ++i) {
            double mean = 0;
            for (int j = 0; j < m; ++j) mean += va.at(i, j);
            mean /= m;
            double var = 0;
            for (int j = 0; j < m; ++j) {
              const double d = va.at(i, j) - mean;
              var += d * d;
            }
            var /= m;
            const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
            double g_mean = 0, gx_mean = 0;
            for (int j = 0; j < m; ++j) {
              g_mean += g.at(i, j);
              gx_mean += g.at(i, j) * n.value.at(i, j);
            }
            g_mean /= m;
            gx_mean /= m;
            for (int j = 0; j < m; ++j) {
              t.at(i, j) +=
                  inv * (g.at(i, j) - g_mean - n.value.at(i, j) * gx_mean);
            }
          }
        }
        break;
      }
      case Op::kSoftmaxCol: {
        if (wants(n.a)) {
          Tensor& t = ga();
          for (int j = 0; j < g.cols; ++j) {
            double dot = 0;
            for (int i = 0; i < g.rows; ++i) dot += g.at(i, j) * n.value.at(i, j);
            for (int i = 0; i < g.rows; ++i) {
              t.at(i, j) += n.value.at(i, j) * (g.at(i, j) - dot);
            }
          }
        }
        break;
      }
      case Op::kMeanRows: {
        if (wants(n.a)) {
          const Tensor& va = nodes_[static_cast<std::size_t>(n.a)].value;
          Tensor& t = ga();
          for (int i = 0; i < va.rows; ++i) {
            for (int j = 0; j < va.cols; ++j) t.at(i, j) += g.at(0, j) / va.rows;
          }
        }
        break;
      }
      case Op::kSumAll: {
        if (wants(n.a)) {
          Tensor& t = ga();
          for (double& v : t.data) v += g.data[0];
        }
        break;
      }
      case Op::kScale: {
        if (wants(n.a)) {
          Tensor& t = ga();
          for (std::size_t i = 0; i < g.data.size(); ++i) {
            t.data[i] += n.scalar * g.data[i];
          }
        }
        break;
      }
      case Op::kAddRow: {
        if (wants(n.a)) {
          Tensor& t = ga();
          for (std::size_t i = 0; i < g.data.size(); ++i) t.data[i] += g.data[i];
        }
        if (wants(n.b)) {
          Tensor& t = gb();
          for (int i = 0; i < g.rows; ++i) {
            for (int j = 0; j < g.cols; ++j) t.at(0, j) += g.at(i, j);
          }
        }
        break;
      }
      case Op::kPadRows: {
        if (wants(n.a)) {
          const Tensor& va = nodes_[static_cast<std::size_t>(n.a)].value;
          Tensor& t = ga();
          for (int i = 0; i < va.rows; ++i) {
            for (int j = 0; j < va.cols; ++j) t.at(i, j) += g.at(i, j);
          }
        }
        break;
      }
      case Op::kHuber: {
        const Tensor& vp = nodes_[static_cast<std::size_t>(n.a)].value;
        const Tensor& vt = nodes_[static_cast<std::size_t>(n.b)].value;
        for (std::size_t i = 0; i < g.data.size(); ++i) {
          const double e = vp.data[i] - vt.data[i];
          const double d = std::clamp(e, -n.scalar, n.scalar) * g.data[i];
          if (wants(n.a)) {
            Tensor& t = ga();
            t.data[i] += d;
          }
          if (wants(n.b)) {
            Tensor& t = gb();
            t.data[i] -= d;
          }
        }
        break;
      }
    }
  }
  return grad;
}

}  // namespace ged
