#ifndef GED_ADAM_HPP
#define GED_ADAM_HPP

#include <cstdint>
#include <vector>

#include "ged/tensor.hpp"

namespace ged {

// Bias-corrected Adam over a fixed list of parameter tensors. Moment buffers
// are indexed by position, so the parameter order must not change between
// steps.
struct AdamState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
};

AdamState make_adam(const std::vector<Tensor>& params, double learning_rate);

// One update in place. grads[i] must match params[i] in shape.
void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads,
               AdamState& state);

}  // namespace ged

#endif
