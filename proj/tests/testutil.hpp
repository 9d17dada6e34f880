#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "poirec/hypergraph.hpp"
#include "poirec/pipeline.hpp"
#include "poirec/scenario.hpp"
#include "poirec/types.hpp"

namespace testutil {

using namespace poirec;

inline Hypergraph random_hypergraph(int max_nodes, int max_edges,
                                    std::mt19937_64& rng) {
  Hypergraph g;
  g.node_count = 2 + static_cast<int>(rng() % max_nodes);
  int edges = 1 + static_cast<int>(rng() % max_edges);
  for (int e = 0; e < edges; ++e) {
    int size = 1 + static_cast<int>(rng() % 5);
    std::vector<int> members;
    for (int k = 0; k < size; ++k)
      members.push_back(static_cast<int>(rng() % g.node_count));
    g.edges.push_back(std::move(members));
  }
  g.finalize();
  return g;
}

inline DirectedHypergraph random_directed(int max_nodes, int max_edges,
                                          std::mt19937_64& rng) {
  DirectedHypergraph g;
  g.node_count = 2 + static_cast<int>(rng() % max_nodes);
  int edges = 1 + static_cast<int>(rng() % max_edges);
  for (int e = 0; e < edges; ++e) {
    g.sources.push_back({static_cast<int>(rng() % g.node_count)});
    g.targets.push_back({static_cast<int>(rng() % g.node_count)});
  }
  g.finalize();
  return g;
}

// --- independent conv oracle (explicit loops over the hyperedge lists) ---

inline Matrix oracle_aggregate(const Hypergraph& g, const Matrix& nodes) {
  Matrix out(g.edge_count(), nodes.cols);
  for (int e = 0; e < g.edge_count(); ++e)
    for (int c = 0; c < nodes.cols; ++c) {
      double sum = 0;
      for (int n : g.edges[e]) sum += nodes(n, c);
      out(e, c) = sum / g.edges[e].size();
    }
  return out;
}

inline Matrix oracle_propagate(const Hypergraph& g, const Matrix& msg,
                               const Matrix& prev) {
  Matrix out(g.node_count, prev.cols);
  for (int n = 0; n < g.node_count; ++n) {
    std::vector<int> incident;
    for (int e = 0; e < g.edge_count(); ++e)
      for (int m : g.edges[e])
        if (m == n) incident.push_back(e);
    for (int c = 0; c < prev.cols; ++c) {
      if (incident.empty()) {
        out(n, c) = prev(n, c);
      } else {
        double sum = 0;
        for (int e : incident) sum += msg(e, c);
        out(n, c) = sum / incident.size();
      }
    }
  }
  return out;
}

inline Matrix oracle_residual_stack(const Hypergraph& g, const Matrix& init,
                                    int L) {
  std::vector<Matrix> layers{init};
  for (int l = 1; l <= L; ++l)
    layers.push_back(
        oracle_propagate(g, oracle_aggregate(g, layers.back()), layers.back()));
  Matrix out(init.rows, init.cols);
  for (int l = 0; l <= L; ++l)
    for (std::size_t i = 0; i < out.data.size(); ++i) {
      out.data[i] += layers[l].data[i];
      if (l >= 1) out.data[i] += layers[l - 1].data[i];
    }
  for (auto& v : out.data) v /= (L + 1);
  return out;
}

inline Matrix oracle_directed_conv(const DirectedHypergraph& g,
                                   const Matrix& init, int L) {
  std::vector<Matrix> layers{init};
  for (int l = 1; l <= L; ++l) {
    const Matrix& prev = layers.back();
    Matrix msg(g.edge_count(), init.cols);
    for (int e = 0; e < g.edge_count(); ++e)
      for (int c = 0; c < init.cols; ++c) {
        double sum = 0;
        for (int n : g.sources[e]) sum += prev(n, c);
        msg(e, c) = sum / g.sources[e].size();
      }
    Matrix next(g.node_count, init.cols);
    for (int n = 0; n < g.node_count; ++n) {
      std::vector<int> incoming;
      for (int e = 0; e < g.edge_count(); ++e)
        for (int m : g.targets[e])
          if (m == n) incoming.push_back(e);
      for (int c = 0; c < init.cols; ++c) {
        if (incoming.empty()) {
          next(n, c) = prev(n, c);
        } else {
          double sum = 0;
          for (int e : incoming) sum += msg(e, c);
          next(n, c) = sum / incoming.size();
        }
      }
    }
    layers.push_back(std::move(next));
  }
  Matrix out(init.rows, init.cols);
  for (int l = 0; l <= L; ++l)
    for (std::size_t i = 0; i < out.data.size(); ++i) {
      out.data[i] += layers[l].data[i];
      if (l >= 1) out.data[i] += layers[l - 1].data[i];
    }
  for (auto& v : out.data) v /= (L + 1);
  return out;
}

// --- civil time helpers for writing raw check-in fixtures ---

struct Civil {
  int year, month, day, hh, mm, ss;
};

inline Civil civil_from_unix(std::int64_t ts) {
  std::int64_t days = ts / 86400;
  std::int64_t rem = ts % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  // inverse of days_from_civil
  std::int64_t z = days + 719468;
  std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  unsigned doe = static_cast<unsigned>(z - era * 146097);
  unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  unsigned mp = (5 * doy + 2) / 153;
  unsigned d = doy - (153 * mp + 2) / 5 + 1;
  unsigned m = mp + (mp < 10 ? 3 : -9);
  Civil c;
  c.year = static_cast<int>(y + (m <= 2));
  c.month = static_cast<int>(m);
  c.day = static_cast<int>(d);
  c.hh = static_cast<int>(rem / 3600);
  c.mm = static_cast<int>((rem / 60) % 60);
  c.ss = static_cast<int>(rem % 60);
  return c;
}

inline std::string foursquare_time(std::int64_t ts) {
  static const char* dows[] = {"Thu", "Fri", "Sat", "Sun", "Mon", "Tue", "Wed"};
  static const char* mons[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                               "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  Civil c = civil_from_unix(ts);
  std::int64_t days = ts / 86400 - (ts % 86400 < 0 ? 1 : 0);
  int dow = static_cast<int>(((days % 7) + 7) % 7);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s %s %02d %02d:%02d:%02d +0000 %d",
                dows[dow], mons[c.month - 1], c.day, c.hh, c.mm, c.ss, c.year);
  return buf;
}

inline std::string foursquare_line(const std::string& user,
                                   const std::string& venue,
                                   const std::string& category, double lat,
                                   double lon, int tz_offset_min,
                                   std::int64_t utc_ts) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s\t%s\tcat_%s\t%s\t%.6f\t%.6f\t%d\t%s\n",
                user.c_str(), venue.c_str(), category.c_str(),
                category.c_str(), lat, lon, tz_offset_min,
                foursquare_time(utc_ts).c_str());
  return buf;
}

// --- opposing-scenario fixture -------------------------------------------
// Two 2-POI tasks with identical inputs and opposite targets. Scenario 0
// (local) and scenario 4 (tourist) share every selected sub-hypergraph
// structurally, so the recommendation gradients on every shared gate are
// exactly antiparallel once lambda = 0.

struct OpposingFixture {
  PreparedData data;
  TrainConfig cfg;
};

inline OpposingFixture make_opposing_fixture(int trajectories_per_user = 6) {
  OpposingFixture fx;
  PreparedData& d = fx.data;
  d.centers.centers = {{"center", 40.0, -74.0}};
  for (int u = 0; u < 4; ++u)
    d.catalog.users.push_back({"u" + std::to_string(u)});
  d.catalog.pois.push_back({"p0", 40.0, -74.0, -1});
  d.catalog.pois.push_back({"p1", 40.005, -74.0, -1});
  d.user_types = {UserType::local, UserType::local, UserType::tourist,
                  UserType::tourist};

  // Monday 2012-04-02 10:00 UTC
  std::int64_t base = days_from_civil(2012, 4, 2) * 86400 + 10 * 3600;
  for (int u = 0; u < 4; ++u) {
    bool tourist = u >= 2;
    for (int k = 0; k < trajectories_per_user; ++k) {
      Trajectory t;
      t.user = u;
      t.window_start = base + k * 86400 * 7;  // always a Monday
      int seq[3] = {0, 1, tourist ? 1 : 0};
      for (int j = 0; j < 3; ++j) {
        CheckIn c;
        c.user = u;
        c.poi = seq[j];
        c.timestamp = t.window_start + j * 3600;
        c.lat = d.catalog.pois[c.poi].lat;
        c.lon = d.catalog.pois[c.poi].lon;
        t.checkins.push_back(c);
      }
      ScenarioLabel l;
      l.user_type = tourist ? UserType::tourist : UserType::local;
      l.temporal = TemporalContext::workday;
      l.spatial = SpatialRegion::downtown;
      d.trajectories.push_back(std::move(t));
      d.labels.push_back(l);
      d.is_train.push_back(true);
    }
  }
  d.graphs = build_graphs(d.trajectories, d.is_train, d.labels, d.catalog,
                          d.centers, 10.0, 2.5, false);

  TrainConfig& cfg = fx.cfg;
  cfg.dim = 8;
  cfg.layers = 2;
  cfg.lr = 1e-2;
  cfg.weight_decay = 0.0;
  cfg.lambda = 0.0;  // pure recommendation loss: provably antiparallel
  cfg.batch_size = 4;
  cfg.epochs = 50;
  cfg.warmup_epochs = 1;
  cfg.sim_window = 4;
  cfg.val_fraction = 0.0;
  cfg.seed = 17;
  return fx;
}

// --- planted-pattern corpus ----------------------------------------------
// 2x2x2 scenario corpus: POIs grouped into region-pure communities of 10;
// within a community every scenario has its own hub POI that every
// trajectory of that scenario targets.

struct PlantedSpec {
  int users = 500;
  int communities_downtown = 15;
  int communities_suburban = 14;
  int pattern_traj_per_user = 12;
  std::uint64_t seed = 99;
};

inline int planted_hub(int scenario, int community) {
  return (scenario * 3 + community) % 10;
}

inline void write_planted_corpus(const std::string& path,
                                 const PlantedSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::ofstream out(path);
  int n_comm = spec.communities_downtown + spec.communities_suburban;
  double clat = 40.7128, clon = -74.0060;

  // 10 members per community; downtown communities sit inside the 10 km
  // radius, suburban ones ~20 km out.
  std::vector<double> lat(n_comm * 10), lon(n_comm * 10);
  for (int c = 0; c < n_comm; ++c) {
    bool down = c < spec.communities_downtown;
    double blat = clat + (down ? 0.0 : 0.18) + 0.004 * (c % 5);
    double blon = clon + (down ? 0.0 : 0.10) + 0.004 * (c / 5);
    for (int k = 0; k < 10; ++k) {
      lat[c * 10 + k] = blat + 0.0006 * k;
      lon[c * 10 + k] = blon + 0.0003 * (k % 3);
    }
  }
  // hotels: ids n_comm*10 .. +9, half downtown, half suburban
  std::vector<double> hlat(10), hlon(10);
  for (int h = 0; h < 10; ++h) {
    bool down = h < 5;
    hlat[h] = clat + (down ? 0.01 : 0.2) + 0.001 * h;
    hlon[h] = clon + (down ? 0.01 : 0.12);
  }
  static const char* kCats[] = {"Restaurant", "Museum", "Park", "Office",
                                "Bar",        "Gym",    "Shop", "Theater"};

  std::int64_t monday = days_from_civil(2012, 4, 2) * 86400;
  for (int u = 0; u < spec.users; ++u) {
    bool tourist = u % 2 == 1;
    std::string uid = "user" + std::to_string(u);
    int week = 0;
    if (tourist) {
      // Two early accommodation windows push the share above 5%.
      for (int w = 0; w < 2; ++w) {
        std::int64_t day = monday + (week++) * 7 * 86400;
        for (int j = 0; j < 2; ++j) {
          int h = static_cast<int>(rng() % 10);
          out << foursquare_line(uid, "hotel" + std::to_string(h), "Hotel",
                                 hlat[h], hlon[h], 0,
                                 day + (10 + j) * 3600);
        }
      }
    }
    for (int k = 0; k < spec.pattern_traj_per_user; ++k) {
      bool weekend = k % 2 == 1;
      bool down = (k / 2) % 2 == 0;
      std::int64_t day = monday + (week++) * 7 * 86400 +
                         (weekend ? 5 : 1) * 86400;  // Sat or Tue
      int scenario = 4 * (tourist ? 1 : 0) + 2 * (weekend ? 1 : 0) +
                     (down ? 0 : 1);
      int c = down ? static_cast<int>(rng() % spec.communities_downtown)
                   : spec.communities_downtown +
                         static_cast<int>(rng() % spec.communities_suburban);
      int hub = planted_hub(scenario, c);
      // four distinct non-hub members, then the hub as target
      std::vector<int> pool;
      for (int m = 0; m < 10; ++m)
        if (m != hub) pool.push_back(m);
      for (int m = 0; m < 4; ++m)
        std::swap(pool[m], pool[m + rng() % (pool.size() - m)]);
      for (int j = 0; j < 5; ++j) {
        int member = j < 4 ? pool[j] : hub;
        int poi = c * 10 + member;
        out << foursquare_line(uid, "poi" + std::to_string(poi),
                               kCats[poi % 8], lat[poi], lon[poi], 0,
                               day + (10 + j) * 3600);
      }
    }
  }
}

inline std::string temp_dir(const std::string& tag) {
  std::string dir = "poirec_test_" + tag;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
