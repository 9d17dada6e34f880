#include "poirec/optim.hpp"

#include <cassert>
#include <cmath>

namespace poirec {

void adam_step(Matrix& value, const Matrix& grad, AdamState& state,
               const AdamConfig& cfg) {
  assert(value.same_shape(grad));
  assert(value.same_shape(state.m));
  ++state.t;
  double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < value.data.size(); ++i) {
    double g = grad.data[i] + cfg.weight_decay * value.data[i];
    double m = state.m.data[i] = cfg.beta1 * state.m.data[i] +
                                 (1.0 - cfg.beta1) * g;
    double v = state.v.data[i] = cfg.beta2 * state.v.data[i] +
                                 (1.0 - cfg.beta2) * g * g;
    double mhat = m / bc1;
    double vhat = v / bc2;
    value.data[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

}  // namespace poirec
