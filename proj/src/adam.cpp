#include "ged/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace ged {

AdamState make_adam(const std::vector<Tensor>& params, double learning_rate) {
  AdamState state;
  state.learning_rate = learning_rate;
  state.first_moment.reserve(params.size());
  state.second_moment.reserve(params.size());
  for (const Tensor& p : params) {
    state.first_moment.emplace_back(p.rows, p.cols);
    state.second_moment.emplace_back(p.rows, p.cols);
  }
  return state;
}

void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads,
               AdamState& state) {
  if (params.size() != grads.size() ||
      params.size() != state.first_moment.size()) {
    throw std::invalid_argument("adam_step: parameter/gradient count mismatch");
  }
  ++state.step;
  const double correct1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double correct2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params[i];
    const Tensor& g = grads[i];
    if (!p.same_shape(g)) {
      throw std::invalid_argument("adam_step: gradient shape mismatch");
    }
    Tensor& m = state.first_moment[i];
    Tensor& v = state.second_moment[i];
    for (std::size_t k = 0; k < p.data.size(); ++k) {
      m.data[k] = state.beta1 * m.data[k] + (1.0 - state.beta1) * g.data[k];
      v.data[k] = state.beta2 * v.data[k] + (1.0 - state.beta2) * g.data[k] * g.data[k];
      const double m_hat = m.data[k] / correct1;
      const double v_hat = v.data[k] / correct2;
      p.data[k] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

}  // namespace ged
