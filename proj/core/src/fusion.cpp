#include "poirec/fusion.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <set>

namespace poirec {

UserLift build_user_lift(const std::vector<Trajectory>& trajectories,
                         const std::vector<bool>& is_train,
                         const std::vector<ScenarioLabel>& labels,
                         UserType slice, bool merged, int user_count) {
  // counts[u][poi] accumulated over the user's routed train trajectories
  std::vector<std::vector<std::pair<int, int>>> counts(user_count);
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    if (!is_train[i]) continue;
    if (!merged && labels[i].user_type != slice) continue;
    const auto& t = trajectories[i];
    std::set<int> distinct;
    for (const auto& c : t.checkins) distinct.insert(c.poi);
    auto& bucket = counts[t.user];
    for (int p : distinct) {
      auto it = std::find_if(bucket.begin(), bucket.end(),
                             [&](const auto& e) { return e.first == p; });
      if (it == bucket.end())
        bucket.emplace_back(p, 1);
      else
        ++it->second;
    }
  }

  UserLift lift;
  lift.user_count = user_count;
  lift.offsets.assign(user_count + 1, 0);
  for (int u = 0; u < user_count; ++u) {
    auto& bucket = counts[u];
    std::sort(bucket.begin(), bucket.end());
    lift.offsets[u + 1] = lift.offsets[u] + static_cast<int>(bucket.size());
    double total = 0;
    for (auto& [p, n] : bucket) total += n;
    for (auto& [p, n] : bucket) {
      lift.poi.push_back(p);
      lift.weight.push_back(n / total);
    }
  }
  return lift;
}

Matrix lift_user_rows(const Matrix& poi_rows, const UserLift& lift,
                      const std::vector<int>& users) {
  Matrix out(static_cast<int>(users.size()), poi_rows.cols);
  for (std::size_t k = 0; k < users.size(); ++k) {
    int u = users[k];
    auto dst = out.row(static_cast<int>(k));
    for (int j = lift.offsets[u]; j < lift.offsets[u + 1]; ++j) {
      auto src = poi_rows.row(lift.poi[j]);
      double w = lift.weight[j];
      for (int c = 0; c < poi_rows.cols; ++c) dst[c] += w * src[c];
    }
  }
  return out;
}

Matrix gate_scale(const Matrix& e, const Matrix& w) {
  assert(w.rows == 1 && w.cols == e.cols);
  Matrix out(e.rows, e.cols);
  for (int r = 0; r < e.rows; ++r) {
    double z = dot(e.row(r), w.row(0));
    double s = 1.0 / (1.0 + std::exp(-z));
    auto src = e.row(r);
    auto dst = out.row(r);
    for (int c = 0; c < e.cols; ++c) dst[c] = s * src[c];
  }
  return out;
}

Matrix gate_fuse_user(const Matrix& e_tem, const Matrix& e_c,
                      const Matrix& e_t, const Matrix& e_g,
                      const Matrix& w_tem, const Matrix& w_c,
                      const Matrix& w_t, const Matrix& w_g) {
  // Association matches the tape path bit for bit: (tem + c) + (t + g).
  Matrix out = gate_scale(e_tem, w_tem);
  axpy(out, gate_scale(e_c, w_c), 1.0);
  Matrix right = gate_scale(e_t, w_t);
  axpy(right, gate_scale(e_g, w_g), 1.0);
  axpy(out, right, 1.0);
  return out;
}

Matrix sum_fuse_poi(const std::vector<const Matrix*>& views) {
  assert(!views.empty());
  Matrix out = *views[0];
  for (std::size_t i = 1; i < views.size(); ++i) axpy(out, *views[i], 1.0);
  return out;
}

std::vector<double> score_candidates(const Matrix& fused_poi,
                                     std::span<const double> repr) {
  std::vector<double> scores(fused_poi.rows);
  for (int p = 0; p < fused_poi.rows; ++p)
    scores[p] = dot(fused_poi.row(p), repr);
  return scores;
}

int rank_of(const std::vector<double>& scores, int target) {
  double st = scores[target];
  int rank = 1;
  for (int p = 0; p < static_cast<int>(scores.size()); ++p) {
    if (scores[p] > st || (scores[p] == st && p < target)) ++rank;
  }
  return rank;
}

std::vector<int> top_k(const std::vector<double>& scores, int k) {
  std::vector<int> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  k = std::min<int>(k, static_cast<int>(scores.size()));
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  idx.resize(k);
  return idx;
}

}  // namespace poirec
