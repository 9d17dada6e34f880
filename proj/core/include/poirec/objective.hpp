#pragma once

#include <array>
#include <span>
#include <vector>

#include "poirec/matrix.hpp"

namespace poirec {

struct LossBreakdown {
  double l_con_user = 0.0;
  double l_con_poi = 0.0;
  double l_rec = 0.0;
  double l_final = 0.0;
  int scenario_id = -1;
};

// Cosine with a 1e-12 norm floor; zero-norm rows give 0.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// InfoNCE over the batch rows of two views: positives are same-index
// rows, negatives the rest of the batch. Stabilized log-sum-exp.
double info_nce_pair(const Matrix& view_a, const Matrix& view_b, double tau);

// Sum over the 6 unordered view pairs, canonical order {Tem, C, G, T}.
double contrastive_sum(const std::array<const Matrix*, 4>& views, double tau);

// Mean softmax cross-entropy of the target under each score row.
double rec_loss(const Matrix& scores, const std::vector<int>& targets);

LossBreakdown final_loss(double l_con_user, double l_con_poi, double l_rec,
                         double lambda, int scenario_id);

}  // namespace poirec
