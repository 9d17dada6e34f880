#pragma once

#include <string>
#include <vector>

#include "poirec/scenario.hpp"
#include "poirec/types.hpp"

namespace poirec {

// Sparse incidence structure; both orientations (edge->nodes and
// node->edges) are available after finalize().
struct Hypergraph {
  int node_count = 0;
  std::vector<std::vector<int>> edges;  // sorted unique node ids per edge

  // CSR node -> incident edge ids
  std::vector<int> node_offsets;
  std::vector<int> node_edges;

  void finalize();
  int edge_count() const { return static_cast<int>(edges.size()); }
  int degree(int node) const {
    return node_offsets[node + 1] - node_offsets[node];
  }
  std::size_t incidence_nnz() const;
};

struct DirectedHypergraph {
  int node_count = 0;
  std::vector<std::vector<int>> sources;  // per edge
  std::vector<std::vector<int>> targets;  // per edge
  std::vector<int> multiplicity;          // observation count per edge

  // CSR node -> edges having node in the target set
  std::vector<int> in_offsets;
  std::vector<int> in_edges;

  void finalize();
  int edge_count() const { return static_cast<int>(sources.size()); }
  int in_degree(int node) const {
    return in_offsets[node + 1] - in_offsets[node];
  }
};

// One sub-hypergraph per slice of the splitting dimension, or a single
// merged graph when built with merged=true (the no-subgraph ablation).
struct GraphSet {
  Hypergraph collaborative[2];   // local, tourist
  Hypergraph temporal_user[2];   // workday, weekend
  Hypergraph temporal_poi[2];    // workday, weekend
  Hypergraph geographical[2];    // downtown, suburban
  std::vector<int> geo_members[2];  // region-local node -> catalog poi
  DirectedHypergraph transitional;
  bool merged = false;

  const Hypergraph& collab_for(const ScenarioLabel& l) const {
    return collaborative[merged ? 0 : static_cast<int>(l.user_type)];
  }
  const Hypergraph& temporal_user_for(const ScenarioLabel& l) const {
    return temporal_user[merged ? 0 : static_cast<int>(l.temporal)];
  }
  const Hypergraph& temporal_poi_for(const ScenarioLabel& l) const {
    return temporal_poi[merged ? 0 : static_cast<int>(l.temporal)];
  }
  int geo_slice(const ScenarioLabel& l) const {
    return merged ? 0 : static_cast<int>(l.spatial);
  }
};

// Builders consume the training split only. `labels` runs parallel to
// `trajectories`; entries for non-train trajectories are ignored.

void build_collaborative(const std::vector<Trajectory>& trajectories,
                         const std::vector<bool>& is_train,
                         const std::vector<ScenarioLabel>& labels,
                         int poi_count, Hypergraph out[2]);

enum class TemporalNodeKind { user, poi };

void build_temporal(const std::vector<Trajectory>& trajectories,
                    const std::vector<bool>& is_train,
                    const std::vector<ScenarioLabel>& labels,
                    TemporalNodeKind kind, int node_count, Hypergraph out[2]);

void build_geographical(const Catalog& catalog, const CityCenterSet& centers,
                        double downtown_radius_km, double threshold_km,
                        Hypergraph out[2], std::vector<int> members[2]);

DirectedHypergraph build_transitional(
    const std::vector<Trajectory>& trajectories,
    const std::vector<bool>& is_train, int poi_count);

// Merged variants ignore the scenario labels and produce a single graph
// (stored in slot 0 of the GraphSet).
GraphSet build_graphs(const std::vector<Trajectory>& trajectories,
                      const std::vector<bool>& is_train,
                      const std::vector<ScenarioLabel>& labels,
                      const Catalog& catalog, const CityCenterSet& centers,
                      double downtown_radius_km, double threshold_km,
                      bool merged);

// Text export: one line per edge, "edge_id\tnode,node,..." (directed edges
// use "src|tgt"). A leading "nodes\t<count>" line and, when node ids are
// not catalog ids, a "map\tid,id,..." line.
void save_hypergraph(const Hypergraph& g, const std::string& path,
                     const std::vector<int>* member_map = nullptr);
Hypergraph load_hypergraph(const std::string& path,
                           std::vector<int>* member_map = nullptr);
void save_directed(const DirectedHypergraph& g, const std::string& path);
DirectedHypergraph load_directed(const std::string& path);

}  // namespace poirec
