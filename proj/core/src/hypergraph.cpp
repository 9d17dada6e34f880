#include "poirec/hypergraph.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace poirec {

namespace {

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void build_csr(int node_count, const std::vector<std::vector<int>>& groups,
               std::vector<int>& offsets, std::vector<int>& ids) {
  offsets.assign(node_count + 1, 0);
  for (const auto& g : groups)
    for (int n : g) ++offsets[n + 1];
  for (int i = 0; i < node_count; ++i) offsets[i + 1] += offsets[i];
  ids.resize(offsets[node_count]);
  std::vector<int> cursor(offsets.begin(), offsets.end() - 1);
  for (int e = 0; e < static_cast<int>(groups.size()); ++e)
    for (int n : groups[e]) ids[cursor[n]++] = e;
}

}  // namespace

void Hypergraph::finalize() {
  for (auto& e : edges) {
    if (e.empty()) throw DataError("hypergraph contains an empty hyperedge");
    e = sorted_unique(std::move(e));
    if (e.back() >= node_count || e.front() < 0)
      throw DataError("hyperedge references a node out of range");
  }
  build_csr(node_count, edges, node_offsets, node_edges);
}

std::size_t Hypergraph::incidence_nnz() const {
  std::size_t n = 0;
  for (const auto& e : edges) n += e.size();
  return n;
}

void DirectedHypergraph::finalize() {
  if (sources.size() != targets.size())
    throw DataError("directed hypergraph source/target arity mismatch");
  for (std::size_t e = 0; e < sources.size(); ++e) {
    if (sources[e].empty() || targets[e].empty())
      throw DataError("directed hyperedge with empty source or target set");
    sources[e] = sorted_unique(std::move(sources[e]));
    targets[e] = sorted_unique(std::move(targets[e]));
    for (int n : sources[e])
      if (n < 0 || n >= node_count)
        throw DataError("directed hyperedge source out of range");
    for (int n : targets[e])
      if (n < 0 || n >= node_count)
        throw DataError("directed hyperedge target out of range");
  }
  if (multiplicity.empty()) multiplicity.assign(sources.size(), 1);
  build_csr(node_count, targets, in_offsets, in_edges);
}

void build_collaborative(const std::vector<Trajectory>& trajectories,
                         const std::vector<bool>& is_train,
                         const std::vector<ScenarioLabel>& labels,
                         int poi_count, Hypergraph out[2]) {
  out[0] = Hypergraph{};
  out[1] = Hypergraph{};
  out[0].node_count = poi_count;
  out[1].node_count = poi_count;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    if (!is_train[i]) continue;
    std::vector<int> pois;
    pois.reserve(trajectories[i].checkins.size());
    for (const auto& c : trajectories[i].checkins) pois.push_back(c.poi);
    int slot = static_cast<int>(labels[i].user_type);
    out[slot].edges.push_back(sorted_unique(std::move(pois)));
  }
  out[0].finalize();
  out[1].finalize();
}

void build_temporal(const std::vector<Trajectory>& trajectories,
                    const std::vector<bool>& is_train,
                    const std::vector<ScenarioLabel>& labels,
                    TemporalNodeKind kind, int node_count, Hypergraph out[2]) {
  // membership[slice][slot] -> node set
  std::vector<std::set<int>> membership[2];
  membership[0].resize(Catalog::kTimeSlots);
  membership[1].resize(Catalog::kTimeSlots);
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    if (!is_train[i]) continue;
    int slice = static_cast<int>(labels[i].temporal);
    for (const auto& c : trajectories[i].checkins) {
      int node = kind == TemporalNodeKind::user ? c.user : c.poi;
      membership[slice][time_slot_local(c)].insert(node);
    }
  }
  for (int s = 0; s < 2; ++s) {
    out[s] = Hypergraph{};
    out[s].node_count = node_count;
    for (int slot = 0; slot < Catalog::kTimeSlots; ++slot) {
      if (membership[s][slot].empty()) continue;
      out[s].edges.emplace_back(membership[s][slot].begin(),
                                membership[s][slot].end());
    }
    out[s].finalize();
  }
}

void build_geographical(const Catalog& catalog, const CityCenterSet& centers,
                        double downtown_radius_km, double threshold_km,
                        Hypergraph out[2], std::vector<int> members[2]) {
  members[0].clear();
  members[1].clear();
  for (int p = 0; p < catalog.poi_count(); ++p) {
    const auto& rec = catalog.pois[p];
    auto region =
        classify_point(rec.lat, rec.lon, centers, downtown_radius_km);
    members[static_cast<int>(region)].push_back(p);
  }
  for (int r = 0; r < 2; ++r) {
    out[r] = Hypergraph{};
    const auto& m = members[r];
    int n = static_cast<int>(m.size());
    out[r].node_count = n;
    out[r].edges.resize(n);
    for (int i = 0; i < n; ++i) {
      out[r].edges[i].push_back(i);
      const auto& a = catalog.pois[m[i]];
      for (int j = i + 1; j < n; ++j) {
        const auto& b = catalog.pois[m[j]];
        if (haversine_km(a.lat, a.lon, b.lat, b.lon) <= threshold_km) {
          out[r].edges[i].push_back(j);
          out[r].edges[j].push_back(i);
        }
      }
    }
    out[r].finalize();
  }
}

DirectedHypergraph build_transitional(
    const std::vector<Trajectory>& trajectories,
    const std::vector<bool>& is_train, int poi_count) {
  DirectedHypergraph g;
  g.node_count = poi_count;
  std::map<std::pair<int, int>, int> seen;  // (src, tgt) -> edge index
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    if (!is_train[i]) continue;
    const auto& cs = trajectories[i].checkins;
    for (std::size_t k = 0; k + 1 < cs.size(); ++k) {
      std::pair<int, int> key{cs[k].poi, cs[k + 1].poi};
      auto [it, fresh] = seen.try_emplace(key, g.edge_count());
      if (fresh) {
        g.sources.push_back({key.first});
        g.targets.push_back({key.second});
        g.multiplicity.push_back(1);
      } else {
        ++g.multiplicity[it->second];
      }
    }
  }
  g.finalize();
  return g;
}

GraphSet build_graphs(const std::vector<Trajectory>& trajectories,
                      const std::vector<bool>& is_train,
                      const std::vector<ScenarioLabel>& labels,
                      const Catalog& catalog, const CityCenterSet& centers,
                      double downtown_radius_km, double threshold_km,
                      bool merged) {
  GraphSet gs;
  gs.merged = merged;
  std::vector<ScenarioLabel> routing = labels;
  if (merged) {
    // Collapse every trajectory into slice 0 of each dimension.
    for (auto& l : routing) l = ScenarioLabel{};
  }
  build_collaborative(trajectories, is_train, routing, catalog.poi_count(),
                      gs.collaborative);
  build_temporal(trajectories, is_train, routing, TemporalNodeKind::user,
                 catalog.user_count(), gs.temporal_user);
  build_temporal(trajectories, is_train, routing, TemporalNodeKind::poi,
                 catalog.poi_count(), gs.temporal_poi);
  if (merged) {
    // Single region covering the whole catalog.
    gs.geo_members[0].clear();
    gs.geo_members[1].clear();
    for (int p = 0; p < catalog.poi_count(); ++p)
      gs.geo_members[0].push_back(p);
    Hypergraph& g = gs.geographical[0];
    g = Hypergraph{};
    int n = catalog.poi_count();
    g.node_count = n;
    g.edges.resize(n);
    for (int i = 0; i < n; ++i) {
      g.edges[i].push_back(i);
      const auto& a = catalog.pois[i];
      for (int j = i + 1; j < n; ++j) {
        const auto& b = catalog.pois[j];
        if (haversine_km(a.lat, a.lon, b.lat, b.lon) <= threshold_km) {
          g.edges[i].push_back(j);
          g.edges[j].push_back(i);
        }
      }
    }
    g.finalize();
    gs.geographical[1] = Hypergraph{};
    gs.geographical[1].finalize();
  } else {
    build_geographical(catalog, centers, downtown_radius_km, threshold_km,
                       gs.geographical, gs.geo_members);
  }
  gs.transitional = build_transitional(trajectories, is_train,
                                       catalog.poi_count());
  return gs;
}

namespace {

std::vector<int> parse_id_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::stoi(tok));
  return out;
}

void write_id_list(std::ofstream& out, const std::vector<int>& ids) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out << ',';
    out << ids[i];
  }
}

}  // namespace

void save_hypergraph(const Hypergraph& g, const std::string& path,
                     const std::vector<int>* member_map) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write hypergraph: " + path);
  out << "nodes\t" << g.node_count << "\n";
  if (member_map) {
    out << "map\t";
    write_id_list(out, *member_map);
    out << "\n";
  }
  for (int e = 0; e < g.edge_count(); ++e) {
    out << e << "\t";
    write_id_list(out, g.edges[e]);
    out << "\n";
  }
}

Hypergraph load_hypergraph(const std::string& path,
                           std::vector<int>* member_map) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open hypergraph: " + path);
  Hypergraph g;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError("malformed hypergraph line in " + path);
    std::string head = line.substr(0, tab);
    std::string rest = line.substr(tab + 1);
    if (head == "nodes") {
      g.node_count = std::stoi(rest);
    } else if (head == "map") {
      if (member_map) *member_map = parse_id_list(rest);
    } else {
      g.edges.push_back(parse_id_list(rest));
    }
  }
  g.finalize();
  return g;
}

void save_directed(const DirectedHypergraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write hypergraph: " + path);
  out << "nodes\t" << g.node_count << "\n";
  for (int e = 0; e < g.edge_count(); ++e) {
    out << e << "\t";
    write_id_list(out, g.sources[e]);
    out << '|';
    write_id_list(out, g.targets[e]);
    out << "\n";
  }
}

DirectedHypergraph load_directed(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open hypergraph: " + path);
  DirectedHypergraph g;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError("malformed hypergraph line in " + path);
    std::string head = line.substr(0, tab);
    std::string rest = line.substr(tab + 1);
    if (head == "nodes") {
      g.node_count = std::stoi(rest);
      continue;
    }
    auto bar = rest.find('|');
    if (bar == std::string::npos)
      throw DataError("directed hyperedge missing src|tgt separator in " +
                      path);
    g.sources.push_back(parse_id_list(rest.substr(0, bar)));
    g.targets.push_back(parse_id_list(rest.substr(bar + 1)));
  }
  g.finalize();
  return g;
}

}  // namespace poirec
