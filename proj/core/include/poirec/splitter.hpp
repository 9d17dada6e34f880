#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "poirec/matrix.hpp"
#include "poirec/scenario.hpp"

namespace poirec {

struct AdamState {
  Matrix m;
  Matrix v;
  std::int64_t t = 0;
};

// A named trainable tensor. After a split there are two value copies;
// copy_map routes each scenario to one of them. A parameter splits at
// most once.
struct Param {
  std::string name;
  Matrix value;                    // copy 0
  std::optional<Matrix> value_b;   // copy 1, present iff split
  AdamState adam_a;
  AdamState adam_b;
  bool split = false;
  std::array<std::uint8_t, kScenarioCount> copy_map{};  // all 0 when shared
};

class ParamRegistry {
 public:
  int add(const std::string& name, Matrix init);
  int index_of(const std::string& name) const;  // throws on unknown name
  int size() const { return static_cast<int>(params_.size()); }

  Param& at(int i) { return params_[i]; }
  const Param& at(int i) const { return params_[i]; }

  Matrix& route(int param, int scenario_id);
  const Matrix& route(int param, int scenario_id) const;
  AdamState& route_adam(int param, int scenario_id);

  // Duplicates the current value (and optimizer state) into copy 1 and
  // installs the routing map. Throws if already split.
  void apply_split(int param,
                   const std::array<std::uint8_t, kScenarioCount>& copy_map);

  std::size_t total_value_count() const;
  std::size_t initial_value_count() const { return initial_values_; }

 private:
  std::vector<Param> params_;
  std::size_t initial_values_ = 0;
};

// Windowed per-(param, scenario) gradient accumulators.
class GradientBuffers {
 public:
  void init(const ParamRegistry& registry);
  // Accumulates the raw gradient; split params are skipped. Throws on a
  // shape mismatch.
  void record(const ParamRegistry& registry, int param, int scenario_id,
              const Matrix& grad);
  int count(int param, int scenario_id) const;
  Matrix mean(int param, int scenario_id) const;
  void reset();

 private:
  struct Cell {
    Matrix sum;
    int count = 0;
  };
  std::vector<std::array<Cell, kScenarioCount>> cells_;
};

struct SimilarityReport {
  // s[i][j] defined only where both scenarios are active; diagonal 1.
  std::array<std::array<double, kScenarioCount>, kScenarioCount> s{};
  std::array<bool, kScenarioCount> active{};
  double min_sim = 1.0;
  int min_i = -1;
  int min_j = -1;
  bool has_pair() const { return min_i >= 0; }
};

// Cosine similarities between the L2-normalized windowed mean gradients.
// Scenarios with no recorded batches or a zero-norm mean are excluded.
SimilarityReport pairwise_similarity(const GradientBuffers& buffers,
                                     int param);

struct SplitRecord {
  std::string param;
  int epoch = 0;
  int step = 0;
  double min_similarity = 0.0;
  std::vector<int> group_a;  // keeps copy 0
  std::vector<int> group_b;  // routed to copy 1
};

// Checks every still-shared parameter, splits those whose minimum
// pairwise similarity falls below `threshold`, and resets the buffers.
std::vector<SplitRecord> detect_and_split(ParamRegistry& registry,
                                          GradientBuffers& buffers,
                                          double threshold, int epoch,
                                          int step);

void save_split_log(const std::vector<SplitRecord>& records,
                    const std::string& path);
std::vector<SplitRecord> load_split_log(const std::string& path);

}  // namespace poirec
