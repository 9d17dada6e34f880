#include "poirec/config.hpp"

#include <cstdio>
#include <fstream>

#include "poirec/types.hpp"

namespace poirec {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("expected boolean, got: " + v);
}

}  // namespace

void TrainConfig::validate() const {
  if (dim < 1) throw ConfigError("dim must be positive");
  if (layers < 1) throw ConfigError("layers must be >= 1");
  if (lr <= 0) throw ConfigError("lr must be positive");
  if (weight_decay < 0) throw ConfigError("weight_decay must be >= 0");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (patience < 1) throw ConfigError("patience must be positive");
  if (lambda < 0 || lambda > 1) throw ConfigError("lambda must lie in [0,1]");
  if (tau <= 0) throw ConfigError("tau must be positive");
  if (warmup_epochs < 0) throw ConfigError("warmup_epochs must be >= 0");
  if (sim_window < 1) throw ConfigError("sim_window must be positive");
  if (geo_threshold_km <= 0) throw ConfigError("geo_threshold_km must be positive");
  if (downtown_radius_km <= 0)
    throw ConfigError("downtown_radius_km must be positive");
  if (tourist_threshold < 0 || tourist_threshold > 1)
    throw ConfigError("tourist_threshold must lie in [0,1]");
  if (split_ratio < 0 || split_ratio > 1)
    throw ConfigError("split_ratio must lie in [0,1]");
  if (val_fraction < 0 || val_fraction >= 1)
    throw ConfigError("val_fraction must lie in [0,1)");
}

std::map<std::string, std::string> config_to_kv(const TrainConfig& c) {
  std::map<std::string, std::string> kv;
  kv["dim"] = std::to_string(c.dim);
  kv["layers"] = std::to_string(c.layers);
  kv["lr"] = fmt_double(c.lr);
  kv["weight_decay"] = fmt_double(c.weight_decay);
  kv["batch_size"] = std::to_string(c.batch_size);
  kv["epochs"] = std::to_string(c.epochs);
  kv["patience"] = std::to_string(c.patience);
  kv["lambda"] = fmt_double(c.lambda);
  kv["tau"] = fmt_double(c.tau);
  kv["split_threshold"] = fmt_double(c.split_threshold);
  kv["warmup_epochs"] = std::to_string(c.warmup_epochs);
  kv["sim_window"] = std::to_string(c.sim_window);
  kv["geo_threshold_km"] = fmt_double(c.geo_threshold_km);
  kv["downtown_radius_km"] = fmt_double(c.downtown_radius_km);
  kv["tourist_threshold"] = fmt_double(c.tourist_threshold);
  kv["split_ratio"] = fmt_double(c.split_ratio);
  kv["val_fraction"] = fmt_double(c.val_fraction);
  kv["default_tz_offset_min"] = std::to_string(c.default_tz_offset_min);
  kv["min_user_checkins"] = std::to_string(c.min_user_checkins);
  kv["min_poi_checkins"] = std::to_string(c.min_poi_checkins);
  kv["no_split"] = c.no_split ? "true" : "false";
  kv["no_subgraph"] = c.no_subgraph ? "true" : "false";
  kv["seed"] = std::to_string(c.seed);
  return kv;
}

TrainConfig config_from_kv(const std::map<std::string, std::string>& kv,
                           TrainConfig c) {
  for (const auto& [k, v] : kv) {
    try {
      if (k == "dim") c.dim = std::stoi(v);
      else if (k == "layers") c.layers = std::stoi(v);
      else if (k == "lr") c.lr = std::stod(v);
      else if (k == "weight_decay") c.weight_decay = std::stod(v);
      else if (k == "batch_size") c.batch_size = std::stoi(v);
      else if (k == "epochs") c.epochs = std::stoi(v);
      else if (k == "patience") c.patience = std::stoi(v);
      else if (k == "lambda") c.lambda = std::stod(v);
      else if (k == "tau") c.tau = std::stod(v);
      else if (k == "split_threshold") c.split_threshold = std::stod(v);
      else if (k == "warmup_epochs") c.warmup_epochs = std::stoi(v);
      else if (k == "sim_window") c.sim_window = std::stoi(v);
      else if (k == "geo_threshold_km") c.geo_threshold_km = std::stod(v);
      else if (k == "downtown_radius_km") c.downtown_radius_km = std::stod(v);
      else if (k == "tourist_threshold") c.tourist_threshold = std::stod(v);
      else if (k == "split_ratio") c.split_ratio = std::stod(v);
      else if (k == "val_fraction") c.val_fraction = std::stod(v);
      else if (k == "default_tz_offset_min")
        c.default_tz_offset_min = std::stoi(v);
      else if (k == "min_user_checkins") c.min_user_checkins = std::stoi(v);
      else if (k == "min_poi_checkins") c.min_poi_checkins = std::stoi(v);
      else if (k == "no_split") c.no_split = parse_bool(v);
      else if (k == "no_subgraph") c.no_subgraph = parse_bool(v);
      else if (k == "seed") c.seed = std::stoull(v);
      else throw ConfigError("unknown config key: " + k);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("bad value for config key " + k + ": " + v);
    }
  }
  c.validate();
  return c;
}

std::map<std::string, std::string> load_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + " line " + std::to_string(lineno) +
                        ": expected key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void save_kv_file(const std::map<std::string, std::string>& kv,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write config file: " + path);
  for (const auto& [k, v] : kv) out << k << "=" << v << "\n";
}

TrainConfig load_config_file(const std::string& path, TrainConfig base) {
  return config_from_kv(load_kv_file(path), base);
}

void save_config_file(const TrainConfig& cfg, const std::string& path) {
  save_kv_file(config_to_kv(cfg), path);
}

}  // namespace poirec
