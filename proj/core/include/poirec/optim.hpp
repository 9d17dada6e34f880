#pragma once

#include "poirec/matrix.hpp"
#include "poirec/splitter.hpp"

namespace poirec {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // coupled L2: folded into the gradient
};

// Bias-corrected adaptive-moment update, in place.
void adam_step(Matrix& value, const Matrix& grad, AdamState& state,
               const AdamConfig& cfg);

}  // namespace poirec
