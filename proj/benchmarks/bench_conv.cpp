#include <benchmark/benchmark.h>

#include <random>

#include "poirec/conv.hpp"

using namespace poirec;

namespace {

Hypergraph random_graph(int nodes, int edges, std::mt19937_64& rng) {
  Hypergraph g;
  g.node_count = nodes;
  std::uniform_int_distribution<int> size_dist(1, 8);
  std::uniform_int_distribution<int> node_dist(0, nodes - 1);
  for (int e = 0; e < edges; ++e) {
    std::vector<int> members;
    int k = size_dist(rng);
    for (int i = 0; i < k; ++i) members.push_back(node_dist(rng));
    g.edges.push_back(std::move(members));
  }
  g.finalize();
  return g;
}

}  // namespace

static void BM_ResidualStack(benchmark::State& state) {
  std::mt19937_64 rng(7);
  int nodes = static_cast<int>(state.range(0));
  Hypergraph g = random_graph(nodes, nodes / 2, rng);
  Matrix init = uniform_matrix(nodes, 64, -0.1, 0.1, rng);
  for (auto _ : state) {
    Matrix out = residual_stack(g, init, 3);
    benchmark::DoNotOptimize(out.data.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ResidualStack)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

static void BM_DirectedConv(benchmark::State& state) {
  std::mt19937_64 rng(7);
  int nodes = static_cast<int>(state.range(0));
  DirectedHypergraph g;
  g.node_count = nodes;
  std::uniform_int_distribution<int> node_dist(0, nodes - 1);
  for (int e = 0; e < nodes * 2; ++e) {
    g.sources.push_back({node_dist(rng)});
    g.targets.push_back({node_dist(rng)});
  }
  g.finalize();
  Matrix init = uniform_matrix(nodes, 64, -0.1, 0.1, rng);
  for (auto _ : state) {
    Matrix out = directed_conv(g, init, 3);
    benchmark::DoNotOptimize(out.data.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DirectedConv)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

BENCHMARK_MAIN();
