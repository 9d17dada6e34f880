#include <benchmark/benchmark.h>

#include <random>

#include "poirec/model.hpp"
#include "poirec/trainer.hpp"

using namespace poirec;

namespace {

// Small random corpus exercising one scenario per dimension value.
struct Corpus {
  Catalog catalog;
  std::vector<Trajectory> trajectories;
  std::vector<bool> is_train;
  std::vector<ScenarioLabel> labels;
  GraphSet graphs;
};

Corpus make_corpus(int users, int pois, int traj_per_user) {
  Corpus c;
  std::mt19937_64 rng(11);
  for (int u = 0; u < users; ++u)
    c.catalog.users.push_back({"u" + std::to_string(u)});
  for (int p = 0; p < pois; ++p) {
    double lat = 40.6 + 0.2 * (rng() % 1000) / 1000.0;
    double lon = -74.2 + 0.3 * (rng() % 1000) / 1000.0;
    c.catalog.pois.push_back({"p" + std::to_string(p), lat, lon, -1});
  }
  std::uniform_int_distribution<int> poi_dist(0, pois - 1);
  std::int64_t day = 86400;
  for (int u = 0; u < users; ++u) {
    for (int k = 0; k < traj_per_user; ++k) {
      Trajectory t;
      t.user = u;
      t.window_start = day * (k + 1);
      for (int j = 0; j < 5; ++j) {
        CheckIn ci;
        ci.user = u;
        ci.poi = poi_dist(rng);
        ci.timestamp = t.window_start + j * 3600;
        ci.lat = c.catalog.pois[ci.poi].lat;
        ci.lon = c.catalog.pois[ci.poi].lon;
        t.checkins.push_back(ci);
      }
      ScenarioLabel l;
      l.user_type = u % 2 ? UserType::tourist : UserType::local;
      l.temporal = k % 2 ? TemporalContext::weekend : TemporalContext::workday;
      l.spatial = SpatialRegion::downtown;
      c.trajectories.push_back(std::move(t));
      c.labels.push_back(l);
      c.is_train.push_back(true);
    }
  }
  CityCenterSet centers{{{"c", 40.7, -74.0}}};
  c.graphs = build_graphs(c.trajectories, c.is_train, c.labels, c.catalog,
                          centers, 10.0, 2.5, false);
  return c;
}

}  // namespace

static void BM_BatchForwardBackward(benchmark::State& state) {
  Corpus c = make_corpus(100, static_cast<int>(state.range(0)), 8);
  TrainConfig cfg;
  cfg.dim = 64;
  cfg.layers = 3;
  Model model = make_model(c.graphs, c.trajectories, c.is_train, c.labels,
                           c.catalog.user_count(), c.catalog.poi_count(), cfg);
  std::vector<const Trajectory*> members;
  for (std::size_t i = 0; i < c.trajectories.size() && members.size() < 200;
       ++i)
    if (composite_id(c.labels[i]) == 0) members.push_back(&c.trajectories[i]);
  Batch batch = make_batch(members, 0, c.catalog.poi_count());
  for (auto _ : state) {
    ad::Tape tape;
    ForwardResult fwd = batch_forward(tape, model, batch, cfg);
    tape.backward(fwd.l_final);
    benchmark::DoNotOptimize(tape.scalar(fwd.l_final));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BatchForwardBackward)
    ->RangeMultiplier(2)
    ->Range(256, 2048)
    ->Complexity();

static void BM_SceneScoring(benchmark::State& state) {
  Corpus c = make_corpus(100, static_cast<int>(state.range(0)), 8);
  TrainConfig cfg;
  cfg.dim = 64;
  Model model = make_model(c.graphs, c.trajectories, c.is_train, c.labels,
                           c.catalog.user_count(), c.catalog.poi_count(), cfg);
  SceneEmbeddings scene = compute_scene(model, 0);
  for (auto _ : state) {
    auto scores =
        score_trajectory(scene, c.trajectories[0], c.catalog.poi_count());
    benchmark::DoNotOptimize(scores.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SceneScoring)->RangeMultiplier(2)->Range(256, 2048)->Complexity();

BENCHMARK_MAIN();
