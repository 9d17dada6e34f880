#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace poirec {

struct TrainConfig {
  int dim = 128;
  int layers = 3;
  double lr = 1e-3;
  double weight_decay = 5e-4;
  int batch_size = 200;
  int epochs = 100;
  int patience = 10;
  double lambda = 0.1;
  double tau = 0.1;
  double split_threshold = -0.5;
  int warmup_epochs = 20;
  int sim_window = 10;  // batches between conflict checks
  double geo_threshold_km = 2.5;
  double downtown_radius_km = 10.0;
  double tourist_threshold = 0.05;
  double split_ratio = 0.8;
  double val_fraction = 0.1;
  int default_tz_offset_min = 0;
  int min_user_checkins = 0;
  int min_poi_checkins = 0;
  bool no_split = false;
  bool no_subgraph = false;
  std::uint64_t seed = 42;

  void validate() const;
};

std::map<std::string, std::string> config_to_kv(const TrainConfig& cfg);
TrainConfig config_from_kv(const std::map<std::string, std::string>& kv,
                           TrainConfig base = {});

// Flat key=value file; '#' starts a comment. Unknown keys are rejected.
std::map<std::string, std::string> load_kv_file(const std::string& path);
void save_kv_file(const std::map<std::string, std::string>& kv,
                  const std::string& path);

TrainConfig load_config_file(const std::string& path, TrainConfig base = {});
void save_config_file(const TrainConfig& cfg, const std::string& path);

}  // namespace poirec
