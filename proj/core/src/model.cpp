#include "poirec/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "poirec/conv.hpp"

namespace poirec {

const char* const kParamNames[9] = {
    "table.collaborative", "table.temporal_user", "table.temporal_poi",
    "table.geographical",  "table.transitional",  "gate.temporal",
    "gate.collaborative",  "gate.transitional",   "gate.geographical"};

std::vector<int> Model::all_params() const {
  return {p_table_collab, p_table_temporal_user, p_table_temporal_poi,
          p_table_geo,    p_table_transitional,  p_gate_tem,
          p_gate_c,       p_gate_t,              p_gate_g};
}

void attach_graphs(Model& model, const GraphSet& graphs,
                   const std::vector<Trajectory>& trajectories,
                   const std::vector<bool>& is_train,
                   const std::vector<ScenarioLabel>& labels) {
  model.graphs = &graphs;
  model.lifts[0] = build_user_lift(trajectories, is_train, labels,
                                   UserType::local, graphs.merged,
                                   model.user_count);
  if (graphs.merged)
    model.lifts[1] = UserLift{};
  else
    model.lifts[1] = build_user_lift(trajectories, is_train, labels,
                                     UserType::tourist, false,
                                     model.user_count);
}

Model make_model(const GraphSet& graphs,
                 const std::vector<Trajectory>& trajectories,
                 const std::vector<bool>& is_train,
                 const std::vector<ScenarioLabel>& labels, int user_count,
                 int poi_count, const TrainConfig& cfg) {
  Model m;
  m.dim = cfg.dim;
  m.layers = cfg.layers;
  m.user_count = user_count;
  m.poi_count = poi_count;

  std::mt19937_64 rng(cfg.seed);
  double scale = 1.0 / std::sqrt(static_cast<double>(cfg.dim));
  auto table = [&](int rows) {
    return uniform_matrix(rows, cfg.dim, -scale, scale, rng);
  };
  m.p_table_collab = m.registry.add(kParamNames[0], table(poi_count));
  m.p_table_temporal_user = m.registry.add(kParamNames[1], table(user_count));
  m.p_table_temporal_poi = m.registry.add(kParamNames[2], table(poi_count));
  m.p_table_geo = m.registry.add(kParamNames[3], table(poi_count));
  m.p_table_transitional = m.registry.add(kParamNames[4], table(poi_count));
  m.p_gate_tem = m.registry.add(kParamNames[5], table(1));
  m.p_gate_c = m.registry.add(kParamNames[6], table(1));
  m.p_gate_t = m.registry.add(kParamNames[7], table(1));
  m.p_gate_g = m.registry.add(kParamNames[8], table(1));

  attach_graphs(m, graphs, trajectories, is_train, labels);
  return m;
}

Batch make_batch(const std::vector<const Trajectory*>& trajectories,
                 int scenario_id, int poi_count) {
  Batch b;
  b.scenario_id = scenario_id;
  std::set<int> poi_set;
  std::vector<int> user_row(0);
  for (const Trajectory* t : trajectories) {
    if (t->length() < 2)
      throw DataError("batch trajectory shorter than 2 check-ins");
    auto it = std::find(b.users.begin(), b.users.end(), t->user);
    if (it == b.users.end()) {
      b.user_pos.push_back(static_cast<int>(b.users.size()));
      b.users.push_back(t->user);
    } else {
      b.user_pos.push_back(static_cast<int>(it - b.users.begin()));
    }
    std::vector<int> inputs;
    for (int k = 0; k + 1 < t->length(); ++k) {
      int p = t->checkins[k].poi;
      if (p < 0 || p >= poi_count)
        throw DataError("trajectory references POI outside the catalog");
      inputs.push_back(p);
      poi_set.insert(p);
    }
    int target = t->target().poi;
    if (target < 0 || target >= poi_count)
      throw DataError("trajectory references POI outside the catalog");
    poi_set.insert(target);
    b.input_pois.push_back(std::move(inputs));
    b.targets.push_back(target);
  }
  b.batch_pois.assign(poi_set.begin(), poi_set.end());
  return b;
}

namespace {

struct ViewVars {
  ad::Var tem, c, g, t;
  std::array<ad::Var, 4> ordered() const { return {tem, c, g, t}; }
};

ad::Var pairwise_contrastive(ad::Tape& tape, const ViewVars& views,
                             double tau) {
  auto v = views.ordered();
  ad::Var total;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      ad::Var term = tape.info_nce(v[i], v[j], tau);
      total = total.valid() ? tape.add(total, term) : term;
    }
  }
  return total;
}

}  // namespace

ForwardResult batch_forward(ad::Tape& tape, Model& model, const Batch& batch,
                            const TrainConfig& cfg) {
  const GraphSet& gs = *model.graphs;
  ScenarioLabel label = decode_composite(batch.scenario_id);
  int sid = batch.scenario_id;
  ParamRegistry& reg = model.registry;

  ForwardResult r;
  auto leaf = [&](int param) {
    ad::Var v = tape.param(&reg.route(param, sid));
    r.leaves.emplace_back(param, v);
    return v;
  };

  ad::Var t_collab = leaf(model.p_table_collab);
  ad::Var t_tuser = leaf(model.p_table_temporal_user);
  ad::Var t_tpoi = leaf(model.p_table_temporal_poi);
  ad::Var t_geo = leaf(model.p_table_geo);
  ad::Var t_trans = leaf(model.p_table_transitional);
  ad::Var w_tem = leaf(model.p_gate_tem);
  ad::Var w_c = leaf(model.p_gate_c);
  ad::Var w_t = leaf(model.p_gate_t);
  ad::Var w_g = leaf(model.p_gate_g);

  int L = model.layers;
  ad::Var poi_c = ad::residual_stack(tape, gs.collab_for(label), t_collab, L);
  ad::Var poi_tem =
      ad::residual_stack(tape, gs.temporal_poi_for(label), t_tpoi, L);
  ad::Var poi_t = ad::directed_conv(tape, gs.transitional, t_trans, L);

  // Geographical view: convolve the scenario's region slice, every other
  // POI falls back to its initial embedding.
  int gslice = gs.geo_slice(label);
  const auto& members = gs.geo_members[gslice];
  ad::Var poi_g;
  if (members.empty()) {
    poi_g = t_geo;
  } else {
    ad::Var rows = tape.gather_rows(t_geo, members);
    ad::Var conv = ad::residual_stack(tape, gs.geographical[gslice], rows, L);
    poi_g = tape.overlay_rows(t_geo, members, conv);
  }

  ad::Var fused_poi =
      tape.add(tape.add(poi_c, poi_tem), tape.add(poi_g, poi_t));

  ad::Var tem_user_full =
      ad::residual_stack(tape, gs.temporal_user_for(label), t_tuser, L);
  const UserLift& lift = model.lift_for(label);
  ViewVars user_views;
  user_views.tem = tape.gather_rows(tem_user_full, batch.users);
  user_views.c = tape.lift_rows(poi_c, lift, batch.users);
  user_views.t = tape.lift_rows(poi_t, lift, batch.users);
  user_views.g = tape.lift_rows(poi_g, lift, batch.users);

  ad::Var fused_user = tape.add(
      tape.add(tape.gate_scale(user_views.tem, w_tem),
               tape.gate_scale(user_views.c, w_c)),
      tape.add(tape.gate_scale(user_views.t, w_t),
               tape.gate_scale(user_views.g, w_g)));

  ad::Var user_rows = tape.gather_rows(fused_user, batch.user_pos);
  ad::Var context = tape.mean_rows(fused_poi, batch.input_pois);
  ad::Var repr = tape.add(user_rows, context);
  r.scores = tape.scores_nt(repr, fused_poi);
  r.l_rec = tape.softmax_ce(r.scores, batch.targets);

  r.l_con_user = pairwise_contrastive(tape, user_views, cfg.tau);
  ViewVars poi_views;
  poi_views.tem = tape.gather_rows(poi_tem, batch.batch_pois);
  poi_views.c = tape.gather_rows(poi_c, batch.batch_pois);
  poi_views.g = tape.gather_rows(poi_g, batch.batch_pois);
  poi_views.t = tape.gather_rows(poi_t, batch.batch_pois);
  r.l_con_poi = pairwise_contrastive(tape, poi_views, cfg.tau);

  ad::Var con = tape.add(r.l_con_user, r.l_con_poi);
  r.l_final =
      tape.add_scaled(tape.scale(con, cfg.lambda), r.l_rec, 1.0 - cfg.lambda);
  return r;
}

SceneEmbeddings compute_scene(const Model& model, int scenario_id) {
  const GraphSet& gs = *model.graphs;
  ScenarioLabel label = decode_composite(scenario_id);
  const ParamRegistry& reg = model.registry;
  int L = model.layers;

  Matrix poi_c = residual_stack(gs.collab_for(label),
                                reg.route(model.p_table_collab, scenario_id),
                                L);
  Matrix poi_tem = residual_stack(
      gs.temporal_poi_for(label),
      reg.route(model.p_table_temporal_poi, scenario_id), L);
  Matrix poi_t = directed_conv(
      gs.transitional, reg.route(model.p_table_transitional, scenario_id), L);

  const Matrix& geo_init = reg.route(model.p_table_geo, scenario_id);
  int gslice = gs.geo_slice(label);
  const auto& members = gs.geo_members[gslice];
  Matrix poi_g = geo_init;
  if (!members.empty()) {
    Matrix rows(static_cast<int>(members.size()), geo_init.cols);
    for (std::size_t k = 0; k < members.size(); ++k) {
      auto s = geo_init.row(members[k]);
      auto d = rows.row(static_cast<int>(k));
      std::copy(s.begin(), s.end(), d.begin());
    }
    Matrix conv = residual_stack(gs.geographical[gslice], rows, L);
    for (std::size_t k = 0; k < members.size(); ++k) {
      auto s = conv.row(static_cast<int>(k));
      auto d = poi_g.row(members[k]);
      std::copy(s.begin(), s.end(), d.begin());
    }
  }

  SceneEmbeddings scene;
  // (c + tem) + (g + t), matching the tape path bit for bit.
  scene.fused_poi = poi_c;
  axpy(scene.fused_poi, poi_tem, 1.0);
  Matrix right = poi_g;
  axpy(right, poi_t, 1.0);
  axpy(scene.fused_poi, right, 1.0);

  Matrix tem_user = residual_stack(
      gs.temporal_user_for(label),
      reg.route(model.p_table_temporal_user, scenario_id), L);
  std::vector<int> all_users(model.user_count);
  for (int u = 0; u < model.user_count; ++u) all_users[u] = u;
  const UserLift& lift = model.lift_for(label);
  Matrix user_c = lift_user_rows(poi_c, lift, all_users);
  Matrix user_t = lift_user_rows(poi_t, lift, all_users);
  Matrix user_g = lift_user_rows(poi_g, lift, all_users);
  scene.fused_user = gate_fuse_user(
      tem_user, user_c, user_t, user_g,
      reg.route(model.p_gate_tem, scenario_id),
      reg.route(model.p_gate_c, scenario_id),
      reg.route(model.p_gate_t, scenario_id),
      reg.route(model.p_gate_g, scenario_id));
  return scene;
}

std::vector<double> score_trajectory(const SceneEmbeddings& scene,
                                     const Trajectory& trajectory,
                                     int poi_count) {
  if (trajectory.length() < 2)
    throw DataError("scoring requires trajectory length >= 2");
  int d = scene.fused_poi.cols;
  std::vector<double> repr(d, 0.0);
  int inputs = trajectory.length() - 1;
  for (int k = 0; k < inputs; ++k) {
    int p = trajectory.checkins[k].poi;
    if (p < 0 || p >= poi_count)
      throw DataError("trajectory references POI outside the catalog");
    auto row = scene.fused_poi.row(p);
    for (int c = 0; c < d; ++c) repr[c] += row[c];
  }
  double inv = 1.0 / inputs;
  auto user_row = scene.fused_user.row(trajectory.user);
  for (int c = 0; c < d; ++c) repr[c] = user_row[c] + repr[c] * inv;
  return score_candidates(scene.fused_poi, repr);
}

}  // namespace poirec
