#ifndef GED_TENSOR_HPP
#define GED_TENSOR_HPP

#include <cstddef>
#include <vector>

namespace ged {

// Dense row-major matrix of doubles. Vectors are 1xN or Nx1, scalars 1x1.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int r, int c)
      : rows(r), cols(c),
        data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0) {}

  static Tensor scalar(double value) {
    Tensor t(1, 1);
    t.data[0] = value;
    return t;
  }

  double& at(int r, int c) {
    return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                static_cast<std::size_t>(c)];
  }
  double at(int r, int c) const {
    return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                static_cast<std::size_t>(c)];
  }

  std::size_t size() const { return data.size(); }
  bool same_shape(const Tensor& other) const {
    return rows == other.rows && cols == other.cols;
  }
};

}  // namespace ged

#endif
