#pragma once

#include <memory>
#include <string>
#include <vector>

#include "poirec/config.hpp"
#include "poirec/hypergraph.hpp"
#include "poirec/ingest.hpp"
#include "poirec/model.hpp"
#include "poirec/scenario.hpp"
#include "poirec/types.hpp"

namespace poirec {

struct PreparedData {
  Catalog catalog;
  std::vector<Trajectory> trajectories;  // ordered by (user, window_start)
  std::vector<bool> is_train;
  std::vector<ScenarioLabel> labels;      // per trajectory
  std::vector<UserType> user_types;       // per user
  CityCenterSet centers;
  GraphSet graphs;                        // scenario-specific, never merged
};

struct PrepareOptions {
  std::string dataset_path;
  CheckinFormat format = CheckinFormat::foursquare;
  std::string centers_path;  // empty -> built-in defaults (foursquare only)
  std::string out_dir;       // empty -> nothing written
  TrainConfig cfg;
};

// Ingest + classify + build graphs; writes the prepared directory when
// out_dir is set.
PreparedData prepare(const PrepareOptions& opts);

void write_prepared(const PreparedData& data, const PrepareOptions& opts);
PreparedData load_prepared(const std::string& dir);

// Prepared data plus a model wired to the right graph set (merged ones
// are rebuilt here when cfg.no_subgraph is set). Heap-allocated so the
// model's graph pointers stay valid.
struct ModelBundle {
  PreparedData data;
  GraphSet merged;
  bool merged_used = false;
  Model model;
};

std::unique_ptr<ModelBundle> load_model_bundle(const std::string& prepared_dir,
                                               const TrainConfig& cfg);

std::vector<std::string> graph_file_names();

}  // namespace poirec
