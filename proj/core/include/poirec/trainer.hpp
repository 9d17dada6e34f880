#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "poirec/model.hpp"

namespace poirec {

struct StepRecord {
  int epoch = 0;
  int step = 0;
  int scenario_id = 0;
  double l_con_user = 0.0;
  double l_con_poi = 0.0;
  double l_rec = 0.0;
  double l_final = 0.0;
};

struct EpochRecord {
  int epoch = 0;
  std::array<double, kScenarioCount> scenario_loss{};  // NaN when absent
  std::array<int, kScenarioCount> scenario_batches{};
  double mean_loss = 0.0;
  double val_acc5 = 0.0;
  bool has_validation = false;
};

struct TrainResult {
  std::vector<EpochRecord> epochs;
  std::vector<StepRecord> steps;
  std::vector<SplitRecord> splits;
  int best_epoch = 0;  // 1-based; 0 when no epoch ran
  double best_val_acc5 = 0.0;
  bool early_stopped = false;
};

// Trains in place; on return the model holds the best-validation epoch's
// parameters. When out_dir is nonempty, per-step losses and the per-epoch
// history are appended there as CSV.
TrainResult train(Model& model, const std::vector<Trajectory>& trajectories,
                  const std::vector<bool>& is_train,
                  const std::vector<ScenarioLabel>& labels,
                  const TrainConfig& cfg, const std::string& out_dir = "");

// Exact gradients of one batch's final loss for every routed parameter,
// keyed by registry name.
std::map<std::string, Matrix> differentiate(Model& model, const Batch& batch,
                                            const TrainConfig& cfg);

void save_history_csv(const TrainResult& result, const std::string& path);
void save_losses_csv(const std::vector<StepRecord>& steps,
                     const std::string& path);

}  // namespace poirec
