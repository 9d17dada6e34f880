#include "poirec/checkpoint.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "poirec/io.hpp"
#include "poirec/types.hpp"

namespace fs = std::filesystem;

namespace poirec {

namespace {
constexpr const char* kCheckpointVersion = "0.1.0";
}

void save_checkpoint(const std::string& dir, const ParamRegistry& registry,
                     const TrainConfig& cfg) {
  fs::path target(dir);
  fs::path tmp(dir + ".tmp");
  fs::remove_all(tmp);
  fs::create_directories(tmp / "params");

  nlohmann::json index;
  index["checkpoint_version"] = kCheckpointVersion;
  nlohmann::json params = nlohmann::json::array();
  for (int i = 0; i < registry.size(); ++i) {
    const Param& p = registry.at(i);
    nlohmann::json jp;
    jp["name"] = p.name;
    jp["split"] = p.split;
    jp["copy_map"] = p.copy_map;
    jp["adam_t_a"] = p.adam_a.t;
    std::string base = "params/" + std::to_string(i);
    save_matrix(p.value, (tmp / (base + "_a.mat")).string());
    save_matrix(p.adam_a.m, (tmp / (base + "_a.m.mat")).string());
    save_matrix(p.adam_a.v, (tmp / (base + "_a.v.mat")).string());
    if (p.split) {
      jp["adam_t_b"] = p.adam_b.t;
      save_matrix(*p.value_b, (tmp / (base + "_b.mat")).string());
      save_matrix(p.adam_b.m, (tmp / (base + "_b.m.mat")).string());
      save_matrix(p.adam_b.v, (tmp / (base + "_b.v.mat")).string());
    }
    params.push_back(std::move(jp));
  }
  index["params"] = std::move(params);
  {
    std::ofstream out(tmp / "registry.json");
    if (!out) throw DataError("cannot write registry.json");
    out << index.dump(2) << "\n";
  }
  save_config_file(cfg, (tmp / "config.kv").string());

  fs::remove_all(target);
  fs::rename(tmp, target);
}

LoadedCheckpoint load_checkpoint(const std::string& dir) {
  fs::path root(dir);
  std::ifstream in(root / "registry.json");
  if (!in) throw ConfigError("not a checkpoint directory: " + dir);
  nlohmann::json index = nlohmann::json::parse(in);
  if (index.value("checkpoint_version", "") != kCheckpointVersion)
    throw ConfigError("incompatible checkpoint version in " + dir +
                      " (expected " + kCheckpointVersion + ")");

  LoadedCheckpoint ck;
  ck.config = load_config_file((root / "config.kv").string());
  int i = 0;
  for (const auto& jp : index["params"]) {
    std::string base = "params/" + std::to_string(i);
    Matrix value = load_matrix((root / (base + "_a.mat")).string());
    int idx = ck.registry.add(jp["name"].get<std::string>(), std::move(value));
    Param& p = ck.registry.at(idx);
    p.adam_a.m = load_matrix((root / (base + "_a.m.mat")).string());
    p.adam_a.v = load_matrix((root / (base + "_a.v.mat")).string());
    p.adam_a.t = jp["adam_t_a"].get<std::int64_t>();
    if (jp["split"].get<bool>()) {
      std::array<std::uint8_t, kScenarioCount> copy_map{};
      auto jm = jp["copy_map"];
      for (int s = 0; s < kScenarioCount; ++s)
        copy_map[s] = jm[s].get<std::uint8_t>();
      ck.registry.apply_split(idx, copy_map);
      p.value_b = load_matrix((root / (base + "_b.mat")).string());
      p.adam_b.m = load_matrix((root / (base + "_b.m.mat")).string());
      p.adam_b.v = load_matrix((root / (base + "_b.v.mat")).string());
      p.adam_b.t = jp["adam_t_b"].get<std::int64_t>();
    }
    ++i;
  }
  return ck;
}

}  // namespace poirec
