#include "poirec/objective.hpp"

#include <cassert>
#include <cmath>
#include <iostream>

#include "poirec/types.hpp"

namespace poirec {

namespace {
constexpr double kNormFloor = 1e-12;
}

double cosine_similarity(std::span<const double> a,
                         std::span<const double> b) {
  double na = l2_norm(a);
  double nb = l2_norm(b);
  if (na <= kNormFloor || nb <= kNormFloor) return 0.0;
  return dot(a, b) / (na * nb);
}

double info_nce_pair(const Matrix& view_a, const Matrix& view_b, double tau) {
  assert(view_a.same_shape(view_b));
  if (tau <= 0.0) throw ConfigError("info_nce temperature must be positive");
  int n = view_a.rows;
  if (n == 0) return 0.0;

  bool warned = false;
  Matrix sim(n, n);
  for (int i = 0; i < n; ++i) {
    double na = l2_norm(view_a.row(i));
    if (na <= kNormFloor && !warned) {
      std::cerr << "warning: zero-norm row in contrastive batch, cosine"
                   " treated as 0\n";
      warned = true;
    }
    for (int j = 0; j < n; ++j)
      sim(i, j) = cosine_similarity(view_a.row(i), view_b.row(j));
  }
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    auto row = sim.row(i);
    double m = row[0];
    for (double v : row) m = std::max(m, v);
    double s = 0.0;
    for (double v : row) s += std::exp((v - m) / tau);
    loss += m / tau + std::log(s) - sim(i, i) / tau;
  }
  return loss / n;
}

double contrastive_sum(const std::array<const Matrix*, 4>& views, double tau) {
  double total = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      total += info_nce_pair(*views[i], *views[j], tau);
  return total;
}

double rec_loss(const Matrix& scores, const std::vector<int>& targets) {
  assert(static_cast<int>(targets.size()) == scores.rows);
  double loss = 0.0;
  for (int r = 0; r < scores.rows; ++r) {
    auto row = scores.row(r);
    double m = row[0];
    for (double v : row) {
      if (!std::isfinite(v)) throw DataError("non-finite score in rec_loss");
      m = std::max(m, v);
    }
    double s = 0.0;
    for (double v : row) s += std::exp(v - m);
    loss += m + std::log(s) - row[targets[r]];
  }
  return loss / scores.rows;
}

LossBreakdown final_loss(double l_con_user, double l_con_poi, double l_rec,
                         double lambda, int scenario_id) {
  if (lambda < 0.0 || lambda > 1.0)
    throw ConfigError("loss weight lambda must lie in [0, 1]");
  LossBreakdown b;
  b.l_con_user = l_con_user;
  b.l_con_poi = l_con_poi;
  b.l_rec = l_rec;
  b.l_final = lambda * (l_con_user + l_con_poi) + (1.0 - lambda) * l_rec;
  b.scenario_id = scenario_id;
  return b;
}

}  // namespace poirec
