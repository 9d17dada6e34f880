#pragma once

#include <map>
#include <string>
#include <vector>

#include "poirec/model.hpp"

namespace poirec {

struct SliceMetrics {
  double acc1 = 0.0;
  double acc5 = 0.0;
  double acc10 = 0.0;
  double acc20 = 0.0;
  double mrr = 0.0;
  int count = 0;
};

// Keys: "overall", the six dimension slices, and the present composite
// scenario names. Empty slices are absent, not zero.
struct MetricsReport {
  std::map<std::string, SliceMetrics> slices;
};

SliceMetrics metrics_from_ranks(const std::vector<int>& ranks);

MetricsReport slice_report(const std::vector<int>& ranks,
                           const std::vector<int>& scenario_ids);

struct EvalOutput {
  MetricsReport report;
  std::vector<int> traj_ids;
  std::vector<int> scenario_ids;
  std::vector<int> ranks;   // 1-based rank of the true target
  std::vector<int> targets;
  std::vector<std::vector<int>> topk;           // top-20 POI ids
  std::vector<std::vector<double>> topk_scores;
};

// Scores every test trajectory against the full catalog.
EvalOutput evaluate(const Model& model,
                    const std::vector<Trajectory>& trajectories,
                    const std::vector<bool>& is_train,
                    const std::vector<ScenarioLabel>& labels);

struct CategoryDelta {
  bool available = false;
  // slice name -> category id -> predicted share minus true share
  std::map<std::string, std::map<int, double>> deltas;
};

CategoryDelta category_delta(const Catalog& catalog, const EvalOutput& eval);

struct DistanceHistogram {
  std::vector<double> edges = {0, 5, 10, 15, 20, 25};  // last bin open
  // slice name -> {predicted masses, true masses}
  std::map<std::string, std::array<std::vector<double>, 2>> series;
};

DistanceHistogram distance_histogram(const Catalog& catalog,
                                     const std::vector<Trajectory>& trajectories,
                                     const EvalOutput& eval);

void save_report_json(const MetricsReport& report, const std::string& path);
void save_predictions_tsv(const EvalOutput& eval, const std::string& path);
void save_category_delta(const CategoryDelta& delta, const Catalog& catalog,
                         const std::string& csv_path,
                         const std::string& svg_path);
void save_distance_histogram(const DistanceHistogram& hist,
                             const std::string& csv_path,
                             const std::string& svg_path);

}  // namespace poirec
