#pragma once

#include <vector>

#include "poirec/hypergraph.hpp"
#include "poirec/matrix.hpp"

namespace poirec {

// Row-normalized user <- POI mapping derived from the collaborative
// incidence: user u's row is the mean of POI rows over u's training
// trajectories in the slice (each trajectory contributes its distinct
// POIs; repeats across trajectories count with multiplicity).
struct UserLift {
  int user_count = 0;
  std::vector<int> offsets;     // user_count + 1
  std::vector<int> poi;
  std::vector<double> weight;   // normalized per user, rows sum to 1
};

UserLift build_user_lift(const std::vector<Trajectory>& trajectories,
                         const std::vector<bool>& is_train,
                         const std::vector<ScenarioLabel>& labels,
                         UserType slice, bool merged, int user_count);

// E_X^U rows for the requested users; users with no mass get zero rows.
Matrix lift_user_rows(const Matrix& poi_rows, const UserLift& lift,
                      const std::vector<int>& users);

// Per-row scalar gate: out_r = sigmoid(<e_r, w>) * e_r.
Matrix gate_scale(const Matrix& e, const Matrix& w);

// Fused user matrix: sum of the four gated views.
Matrix gate_fuse_user(const Matrix& e_tem, const Matrix& e_c,
                      const Matrix& e_t, const Matrix& e_g,
                      const Matrix& w_tem, const Matrix& w_c,
                      const Matrix& w_t, const Matrix& w_g);

// Elementwise sum of aligned POI view matrices.
Matrix sum_fuse_poi(const std::vector<const Matrix*>& views);

// Scores for all N candidates: dot(repr, fused_poi[p]).
std::vector<double> score_candidates(const Matrix& fused_poi,
                                     std::span<const double> repr);

// 1-based rank of `target` under descending score, ties broken by POI
// index ascending.
int rank_of(const std::vector<double>& scores, int target);

// Indices of the k best scores (descending, index-ascending on ties).
std::vector<int> top_k(const std::vector<double>& scores, int k);

}  // namespace poirec
