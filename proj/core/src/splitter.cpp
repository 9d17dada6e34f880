#include "poirec/splitter.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "poirec/types.hpp"

namespace poirec {

int ParamRegistry::add(const std::string& name, Matrix init) {
  for (const auto& p : params_)
    if (p.name == name)
      throw ConfigError("duplicate parameter name: " + name);
  Param p;
  p.name = name;
  p.adam_a.m = Matrix(init.rows, init.cols);
  p.adam_a.v = Matrix(init.rows, init.cols);
  initial_values_ += init.size();
  p.value = std::move(init);
  params_.push_back(std::move(p));
  return size() - 1;
}

int ParamRegistry::index_of(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (params_[i].name == name) return i;
  throw ConfigError("unknown parameter: " + name);
}

Matrix& ParamRegistry::route(int param, int scenario_id) {
  Param& p = params_[param];
  if (p.split && p.copy_map[scenario_id]) return *p.value_b;
  return p.value;
}

const Matrix& ParamRegistry::route(int param, int scenario_id) const {
  const Param& p = params_[param];
  if (p.split && p.copy_map[scenario_id]) return *p.value_b;
  return p.value;
}

AdamState& ParamRegistry::route_adam(int param, int scenario_id) {
  Param& p = params_[param];
  if (p.split && p.copy_map[scenario_id]) return p.adam_b;
  return p.adam_a;
}

void ParamRegistry::apply_split(
    int param, const std::array<std::uint8_t, kScenarioCount>& copy_map) {
  Param& p = params_[param];
  if (p.split)
    throw DataError("parameter " + p.name + " is already split");
  p.value_b = p.value;  // value continuity: copies start bitwise equal
  p.adam_b = p.adam_a;
  p.copy_map = copy_map;
  p.split = true;
}

std::size_t ParamRegistry::total_value_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) {
    n += p.value.size();
    if (p.value_b) n += p.value_b->size();
  }
  return n;
}

void GradientBuffers::init(const ParamRegistry& registry) {
  cells_.assign(registry.size(), {});
}

void GradientBuffers::record(const ParamRegistry& registry, int param,
                             int scenario_id, const Matrix& grad) {
  const Param& p = registry.at(param);
  if (p.split) return;
  if (!grad.same_shape(p.value))
    throw DataError("gradient shape mismatch for parameter " + p.name);
  Cell& cell = cells_[param][scenario_id];
  if (cell.count == 0)
    cell.sum = grad;
  else
    axpy(cell.sum, grad, 1.0);
  ++cell.count;
}

int GradientBuffers::count(int param, int scenario_id) const {
  return cells_[param][scenario_id].count;
}

Matrix GradientBuffers::mean(int param, int scenario_id) const {
  const Cell& cell = cells_[param][scenario_id];
  if (cell.count == 0) throw DataError("no gradients recorded");
  Matrix m = cell.sum;
  double inv = 1.0 / cell.count;
  for (auto& v : m.data) v *= inv;
  return m;
}

void GradientBuffers::reset() {
  for (auto& per_param : cells_)
    for (auto& cell : per_param) cell = Cell{};
}

SimilarityReport pairwise_similarity(const GradientBuffers& buffers,
                                     int param) {
  SimilarityReport rep;
  std::array<Matrix, kScenarioCount> unit;
  for (int s = 0; s < kScenarioCount; ++s) {
    rep.active[s] = false;
    if (buffers.count(param, s) == 0) continue;
    Matrix m = buffers.mean(param, s);
    double norm = 0.0;
    for (double v : m.data) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;  // similarity undefined for this scenario
    for (auto& v : m.data) v /= norm;
    unit[s] = std::move(m);
    rep.active[s] = true;
  }
  double nan = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < kScenarioCount; ++i)
    for (int j = 0; j < kScenarioCount; ++j) rep.s[i][j] = nan;
  for (int i = 0; i < kScenarioCount; ++i) {
    if (!rep.active[i]) continue;
    rep.s[i][i] = 1.0;
    for (int j = i + 1; j < kScenarioCount; ++j) {
      if (!rep.active[j]) continue;
      double d = 0.0;
      for (std::size_t k = 0; k < unit[i].data.size(); ++k)
        d += unit[i].data[k] * unit[j].data[k];
      rep.s[i][j] = d;
      rep.s[j][i] = d;
      if (!rep.has_pair() || d < rep.min_sim) {
        rep.min_sim = d;
        rep.min_i = i;
        rep.min_j = j;
      }
    }
  }
  return rep;
}

std::vector<SplitRecord> detect_and_split(ParamRegistry& registry,
                                          GradientBuffers& buffers,
                                          double threshold, int epoch,
                                          int step) {
  std::vector<SplitRecord> records;
  for (int p = 0; p < registry.size(); ++p) {
    if (registry.at(p).split) continue;
    SimilarityReport rep = pairwise_similarity(buffers, p);
    if (!rep.has_pair() || rep.min_sim >= threshold) continue;

    int seed_a = rep.min_i;
    int seed_b = rep.min_j;
    std::array<std::uint8_t, kScenarioCount> copy_map{};
    SplitRecord rec;
    rec.param = registry.at(p).name;
    rec.epoch = epoch;
    rec.step = step;
    rec.min_similarity = rep.min_sim;
    for (int s = 0; s < kScenarioCount; ++s) {
      int group;
      if (s == seed_a) {
        group = 0;
      } else if (s == seed_b) {
        group = 1;
      } else if (!rep.active[s]) {
        group = 0;  // inactive scenarios stay with the original copy
      } else {
        group = rep.s[s][seed_b] > rep.s[s][seed_a] ? 1 : 0;
      }
      copy_map[s] = static_cast<std::uint8_t>(group);
      (group == 0 ? rec.group_a : rec.group_b).push_back(s);
    }
    registry.apply_split(p, copy_map);
    records.push_back(std::move(rec));
  }
  buffers.reset();
  return records;
}

namespace {

std::string join_ids(const std::vector<int>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ids[i]);
  }
  return out;
}

std::vector<int> split_ids(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::stoi(tok));
  return out;
}

}  // namespace

void save_split_log(const std::vector<SplitRecord>& records,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write split log: " + path);
  char buf[64];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.min_similarity);
    out << r.epoch << "\t" << r.param << "\t" << buf << "\t"
        << join_ids(r.group_a) << "\t" << join_ids(r.group_b) << "\n";
  }
}

std::vector<SplitRecord> load_split_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open split log: " + path);
  std::vector<SplitRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    SplitRecord r;
    std::string epoch, sim, ga, gb;
    if (!std::getline(ss, epoch, '\t') || !std::getline(ss, r.param, '\t') ||
        !std::getline(ss, sim, '\t') || !std::getline(ss, ga, '\t') ||
        !std::getline(ss, gb, '\t'))
      throw DataError("malformed split log line in " + path);
    r.epoch = std::stoi(epoch);
    r.min_similarity = std::stod(sim);
    r.group_a = split_ids(ga);
    r.group_b = split_ids(gb);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace poirec
