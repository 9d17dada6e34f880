#pragma once

#include <vector>

#include "poirec/autodiff.hpp"
#include "poirec/config.hpp"
#include "poirec/fusion.hpp"
#include "poirec/hypergraph.hpp"
#include "poirec/splitter.hpp"

namespace poirec {

// View order used for gate fusion and contrastive pairs.
enum ViewIndex { kViewTem = 0, kViewC = 1, kViewG = 2, kViewT = 3 };

extern const char* const kParamNames[9];

struct Model {
  ParamRegistry registry;
  const GraphSet* graphs = nullptr;
  UserLift lifts[2];  // indexed by user-type slice (merged mode uses [0])
  int dim = 0;
  int layers = 0;
  int user_count = 0;
  int poi_count = 0;

  // registry indices
  int p_table_collab = -1;
  int p_table_temporal_user = -1;
  int p_table_temporal_poi = -1;
  int p_table_geo = -1;
  int p_table_transitional = -1;
  int p_gate_tem = -1;
  int p_gate_c = -1;
  int p_gate_t = -1;
  int p_gate_g = -1;

  std::vector<int> all_params() const;
  const UserLift& lift_for(const ScenarioLabel& l) const {
    return lifts[graphs->merged ? 0 : static_cast<int>(l.user_type)];
  }
};

// Fresh model with tables drawn i.i.d. uniform on [-1/sqrt(d), 1/sqrt(d)].
Model make_model(const GraphSet& graphs,
                 const std::vector<Trajectory>& trajectories,
                 const std::vector<bool>& is_train,
                 const std::vector<ScenarioLabel>& labels, int user_count,
                 int poi_count, const TrainConfig& cfg);

// Rebuilds graph wiring (lifts, pointers) around an existing registry,
// e.g. after loading a checkpoint.
void attach_graphs(Model& model, const GraphSet& graphs,
                   const std::vector<Trajectory>& trajectories,
                   const std::vector<bool>& is_train,
                   const std::vector<ScenarioLabel>& labels);

// One scenario-pure training batch.
struct Batch {
  int scenario_id = 0;
  std::vector<int> users;     // distinct users, first-appearance order
  std::vector<int> user_pos;  // per trajectory -> row in `users`
  std::vector<std::vector<int>> input_pois;  // per trajectory prefix
  std::vector<int> targets;
  std::vector<int> batch_pois;  // distinct POIs across whole trajectories
};

Batch make_batch(const std::vector<const Trajectory*>& trajectories,
                 int scenario_id, int poi_count);

struct ForwardResult {
  ad::Var l_final;
  ad::Var l_rec;
  ad::Var l_con_user;
  ad::Var l_con_poi;
  ad::Var scores;
  // (registry param index, tape leaf) for every routed parameter
  std::vector<std::pair<int, ad::Var>> leaves;
};

// Full differentiable forward pass for one batch; scenario routing picks
// the parameter copies and sub-hypergraphs.
ForwardResult batch_forward(ad::Tape& tape, Model& model, const Batch& batch,
                            const TrainConfig& cfg);

// Inference-time embeddings for one scenario.
struct SceneEmbeddings {
  Matrix fused_poi;   // N x d
  Matrix fused_user;  // M x d
};

SceneEmbeddings compute_scene(const Model& model, int scenario_id);

std::vector<double> score_trajectory(const SceneEmbeddings& scene,
                                     const Trajectory& trajectory,
                                     int poi_count);

}  // namespace poirec
