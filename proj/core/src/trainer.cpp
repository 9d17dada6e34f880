#include "poirec/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>

#include "poirec/optim.hpp"

namespace poirec {

namespace {

void deterministic_shuffle(std::vector<int>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng() % i]);
}

struct ScenarioPool {
  std::vector<int> train_ids;  // trajectory ids used as supervised examples
};

double validation_acc5(const Model& model,
                       const std::vector<Trajectory>& trajectories,
                       const std::vector<ScenarioLabel>& labels,
                       const std::vector<int>& val_ids) {
  std::array<bool, kScenarioCount> needed{};
  for (int id : val_ids) needed[composite_id(labels[id])] = true;
  std::array<SceneEmbeddings, kScenarioCount> scenes;
  for (int s = 0; s < kScenarioCount; ++s)
    if (needed[s]) scenes[s] = compute_scene(model, s);

  int hits = 0;
  for (int id : val_ids) {
    const Trajectory& t = trajectories[id];
    int sid = composite_id(labels[id]);
    auto scores = score_trajectory(scenes[sid], t, model.poi_count);
    if (rank_of(scores, t.target().poi) <= 5) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(val_ids.size());
}

struct RegistrySnapshot {
  std::vector<Param> params;
};

RegistrySnapshot snapshot(const ParamRegistry& reg) {
  RegistrySnapshot s;
  for (int i = 0; i < reg.size(); ++i) s.params.push_back(reg.at(i));
  return s;
}

void restore(ParamRegistry& reg, const RegistrySnapshot& s) {
  for (int i = 0; i < reg.size(); ++i) reg.at(i) = s.params[i];
}

}  // namespace

TrainResult train(Model& model, const std::vector<Trajectory>& trajectories,
                  const std::vector<bool>& is_train,
                  const std::vector<ScenarioLabel>& labels,
                  const TrainConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  TrainResult result;

  // Hold out the chronological tail of each user's training trajectories
  // for early stopping.
  std::vector<std::vector<int>> per_user(model.user_count);
  for (int i = 0; i < static_cast<int>(trajectories.size()); ++i)
    if (is_train[i]) per_user[trajectories[i].user].push_back(i);
  std::array<ScenarioPool, kScenarioCount> pools;
  std::vector<int> val_ids;
  for (auto& ids : per_user) {
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
      return trajectories[a].window_start < trajectories[b].window_start;
    });
    std::size_t n_val = static_cast<std::size_t>(
        static_cast<double>(ids.size()) * cfg.val_fraction);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      int id = ids[k];
      if (k >= ids.size() - n_val)
        val_ids.push_back(id);
      else
        pools[composite_id(labels[id])].train_ids.push_back(id);
    }
  }
  std::size_t n_examples = 0;
  for (const auto& p : pools) n_examples += p.train_ids.size();
  if (n_examples == 0 && cfg.epochs > 0)
    throw DataError("no training trajectories available");
  for (int s = 0; s < kScenarioCount; ++s) {
    if (cfg.epochs > 0 && pools[s].train_ids.empty())
      std::cerr << "warning: scenario " << scenario_name(s)
                << " has no training trajectories, skipped\n";
  }
  bool has_val = !val_ids.empty();
  if (!has_val && cfg.epochs > 0)
    std::cerr << "warning: validation split is empty; early stopping "
                 "disabled, final epoch retained\n";

  GradientBuffers buffers;
  buffers.init(model.registry);
  AdamConfig adam{cfg.lr, 0.9, 0.999, 1e-8, cfg.weight_decay};

  RegistrySnapshot best;
  double best_acc = -1.0;
  int stale_epochs = 0;
  int global_step = 0;
  int recorded_batches = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    // Scenario-pure batches, interleaved round-robin so the gradient
    // buffers stay comparably fresh across scenarios.
    std::array<std::vector<std::vector<int>>, kScenarioCount> batches;
    std::size_t max_batches = 0;
    for (int s = 0; s < kScenarioCount; ++s) {
      std::vector<int> ids = pools[s].train_ids;
      std::mt19937_64 rng(cfg.seed + 1000003ull * epoch + s);
      deterministic_shuffle(ids, rng);
      for (std::size_t k = 0; k < ids.size();
           k += static_cast<std::size_t>(cfg.batch_size)) {
        std::size_t end = std::min(
            ids.size(), k + static_cast<std::size_t>(cfg.batch_size));
        batches[s].emplace_back(ids.begin() + k, ids.begin() + end);
      }
      max_batches = std::max(max_batches, batches[s].size());
    }

    EpochRecord er;
    er.epoch = epoch;
    double nan = std::numeric_limits<double>::quiet_NaN();
    er.scenario_loss.fill(nan);
    std::array<double, kScenarioCount> loss_sum{};
    double epoch_loss = 0.0;
    int epoch_batches = 0;

    for (std::size_t k = 0; k < max_batches; ++k) {
      for (int s = 0; s < kScenarioCount; ++s) {
        if (k >= batches[s].size()) continue;
        std::vector<const Trajectory*> members;
        for (int id : batches[s][k]) members.push_back(&trajectories[id]);
        Batch batch = make_batch(members, s, model.poi_count);

        ad::Tape tape;
        ForwardResult fwd = batch_forward(tape, model, batch, cfg);
        double l_final = tape.scalar(fwd.l_final);
        if (!std::isfinite(l_final))
          throw DataError("non-finite loss at epoch " +
                          std::to_string(epoch) + " scenario " +
                          scenario_name(s));
        tape.backward(fwd.l_final);

        bool record = !cfg.no_split && epoch > cfg.warmup_epochs;
        for (auto& [param, leaf] : fwd.leaves) {
          Matrix grad = tape.grad_or_zero(leaf);
          if (record) buffers.record(model.registry, param, s, grad);
          adam_step(model.registry.route(param, s), grad,
                    model.registry.route_adam(param, s), adam);
        }
        ++global_step;
        result.steps.push_back({epoch, global_step, s,
                                tape.scalar(fwd.l_con_user),
                                tape.scalar(fwd.l_con_poi),
                                tape.scalar(fwd.l_rec), l_final});
        loss_sum[s] += l_final;
        ++er.scenario_batches[s];
        epoch_loss += l_final;
        ++epoch_batches;

        if (record && ++recorded_batches % cfg.sim_window == 0) {
          auto records = detect_and_split(model.registry, buffers,
                                          cfg.split_threshold, epoch,
                                          global_step);
          for (auto& r : records) result.splits.push_back(std::move(r));
        }
      }
    }

    for (int s = 0; s < kScenarioCount; ++s)
      if (er.scenario_batches[s] > 0)
        er.scenario_loss[s] = loss_sum[s] / er.scenario_batches[s];
    er.mean_loss = epoch_batches > 0 ? epoch_loss / epoch_batches : 0.0;

    if (has_val) {
      er.has_validation = true;
      er.val_acc5 = validation_acc5(model, trajectories, labels, val_ids);
      if (er.val_acc5 > best_acc) {
        best_acc = er.val_acc5;
        best = snapshot(model.registry);
        result.best_epoch = epoch;
        stale_epochs = 0;
      } else if (++stale_epochs >= cfg.patience) {
        result.epochs.push_back(er);
        result.early_stopped = true;
        break;
      }
    }
    result.epochs.push_back(er);
  }

  if (has_val && result.best_epoch > 0) {
    restore(model.registry, best);
    result.best_val_acc5 = best_acc;
  } else {
    result.best_epoch = static_cast<int>(result.epochs.size());
  }

  if (!out_dir.empty()) {
    save_losses_csv(result.steps, out_dir + "/losses.csv");
    save_history_csv(result, out_dir + "/history.csv");
    save_split_log(result.splits, out_dir + "/splits.tsv");
  }
  return result;
}

std::map<std::string, Matrix> differentiate(Model& model, const Batch& batch,
                                            const TrainConfig& cfg) {
  ad::Tape tape;
  ForwardResult fwd = batch_forward(tape, model, batch, cfg);
  tape.backward(fwd.l_final);
  std::map<std::string, Matrix> grads;
  for (auto& [param, leaf] : fwd.leaves)
    grads[model.registry.at(param).name] = tape.grad_or_zero(leaf);
  return grads;
}

void save_history_csv(const TrainResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write history: " + path);
  out << "epoch,mean_loss,val_acc5";
  for (int s = 0; s < kScenarioCount; ++s) out << ",loss_" << scenario_name(s);
  out << "\n";
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const auto& e : result.epochs) {
    out << e.epoch << "," << fmt(e.mean_loss) << ","
        << (e.has_validation ? fmt(e.val_acc5) : "");
    for (int s = 0; s < kScenarioCount; ++s) {
      out << ",";
      if (e.scenario_batches[s] > 0) out << fmt(e.scenario_loss[s]);
    }
    out << "\n";
  }
}

void save_losses_csv(const std::vector<StepRecord>& steps,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write losses: " + path);
  out << "epoch,step,scenario_id,l_con_user,l_con_poi,l_rec,l_final\n";
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const auto& s : steps) {
    out << s.epoch << "," << s.step << "," << s.scenario_id << ","
        << fmt(s.l_con_user) << "," << fmt(s.l_con_poi) << ","
        << fmt(s.l_rec) << "," << fmt(s.l_final) << "\n";
  }
}

}  // namespace poirec
