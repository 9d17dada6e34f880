#include "poirec/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "poirec/io.hpp"

namespace fs = std::filesystem;

namespace poirec {

std::vector<std::string> graph_file_names() {
  return {"collaborative_local.hg",  "collaborative_tourist.hg",
          "temporal_user_workday.hg", "temporal_user_weekend.hg",
          "temporal_poi_workday.hg",  "temporal_poi_weekend.hg",
          "geographical_downtown.hg", "geographical_suburban.hg",
          "transitional.hg"};
}

PreparedData prepare(const PrepareOptions& opts) {
  const TrainConfig& cfg = opts.cfg;
  cfg.validate();

  PreparedData data;
  if (!opts.centers_path.empty()) {
    data.centers = CityCenterSet::load(opts.centers_path);
  } else if (opts.format == CheckinFormat::gowalla) {
    throw ConfigError(
        "the gowalla format has no built-in city centers; pass --centers "
        "with one \"name\\tlat\\tlon\" line per city");
  } else {
    data.centers = CityCenterSet::defaults();
  }

  ParseOptions popts;
  popts.format = opts.format;
  popts.default_tz_offset_min = cfg.default_tz_offset_min;
  popts.min_user_checkins = cfg.min_user_checkins;
  popts.min_poi_checkins = cfg.min_poi_checkins;
  ParseResult parsed = parse_checkins(opts.dataset_path, popts);
  data.catalog = std::move(parsed.catalog);

  data.trajectories = segment_trajectories(parsed.checkins_by_user);
  SplitResult split = chronological_split(
      data.trajectories, data.catalog.user_count(), cfg.split_ratio);
  data.is_train = split.is_train;

  if (data.catalog.categories.empty())
    std::cerr << "warning: no category data in " << opts.dataset_path
              << "; every user classifies as local\n";
  data.user_types.resize(data.catalog.user_count());
  for (int u = 0; u < data.catalog.user_count(); ++u)
    data.user_types[u] = classify_user(parsed.checkins_by_user[u],
                                       data.catalog, cfg.tourist_threshold);

  data.labels.resize(data.trajectories.size());
  for (std::size_t i = 0; i < data.trajectories.size(); ++i) {
    const Trajectory& t = data.trajectories[i];
    ScenarioLabel l;
    l.user_type = data.user_types[t.user];
    l.temporal = classify_temporal(t);
    l.spatial = classify_spatial(t, data.centers, cfg.downtown_radius_km);
    data.labels[i] = l;
  }

  data.graphs = build_graphs(data.trajectories, data.is_train, data.labels,
                             data.catalog, data.centers,
                             cfg.downtown_radius_km, cfg.geo_threshold_km,
                             /*merged=*/false);

  if (!opts.out_dir.empty()) write_prepared(data, opts);
  return data;
}

namespace {

void write_trajectories(const PreparedData& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write trajectories: " + path);
  for (std::size_t i = 0; i < data.trajectories.size(); ++i) {
    const Trajectory& t = data.trajectories[i];
    out << i << "\t" << t.user << "\t" << t.window_start << "\t"
        << (data.is_train[i] ? "train" : "test") << "\t";
    for (std::size_t k = 0; k < t.checkins.size(); ++k) {
      const CheckIn& c = t.checkins[k];
      if (k) out << ',';
      out << c.poi << ':' << c.timestamp << ':' << c.tz_offset_min;
    }
    out << "\n";
  }
}

void read_trajectories(PreparedData& data, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open trajectories: " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string id, user, start, split, rest;
    if (!std::getline(ss, id, '\t') || !std::getline(ss, user, '\t') ||
        !std::getline(ss, start, '\t') || !std::getline(ss, split, '\t') ||
        !std::getline(ss, rest))
      throw DataError("malformed trajectory line in " + path);
    Trajectory t;
    t.user = std::stoi(user);
    t.window_start = std::stoll(start);
    std::stringstream cs(rest);
    std::string tok;
    while (std::getline(cs, tok, ',')) {
      CheckIn c;
      if (std::sscanf(tok.c_str(), "%d:%lld:%d", &c.poi,
                      reinterpret_cast<long long*>(&c.timestamp),
                      &c.tz_offset_min) != 3)
        throw DataError("malformed check-in token in " + path);
      c.user = t.user;
      const PoiRecord& p = data.catalog.pois.at(c.poi);
      c.lat = p.lat;
      c.lon = p.lon;
      c.category = p.category;
      t.checkins.push_back(c);
    }
    if (t.length() < 2)
      throw DataError("trajectory shorter than 2 check-ins in " + path);
    data.trajectories.push_back(std::move(t));
    data.is_train.push_back(split == "train");
  }
}

}  // namespace

void write_prepared(const PreparedData& data, const PrepareOptions& opts) {
  fs::create_directories(opts.out_dir);
  fs::create_directories(opts.out_dir + "/graphs");
  save_catalog(data.catalog, opts.out_dir + "/catalog.tsv");
  data.centers.save(opts.out_dir + "/centers.tsv");
  write_trajectories(data, opts.out_dir + "/trajectories.tsv");

  std::ofstream sc(opts.out_dir + "/scenarios.tsv");
  if (!sc) throw DataError("cannot write scenarios.tsv");
  for (std::size_t i = 0; i < data.labels.size(); ++i)
    sc << i << "\t" << composite_id(data.labels[i]) << "\n";
  sc.close();

  auto names = graph_file_names();
  const std::string g = opts.out_dir + "/graphs/";
  save_hypergraph(data.graphs.collaborative[0], g + names[0]);
  save_hypergraph(data.graphs.collaborative[1], g + names[1]);
  save_hypergraph(data.graphs.temporal_user[0], g + names[2]);
  save_hypergraph(data.graphs.temporal_user[1], g + names[3]);
  save_hypergraph(data.graphs.temporal_poi[0], g + names[4]);
  save_hypergraph(data.graphs.temporal_poi[1], g + names[5]);
  save_hypergraph(data.graphs.geographical[0], g + names[6],
                  &data.graphs.geo_members[0]);
  save_hypergraph(data.graphs.geographical[1], g + names[7],
                  &data.graphs.geo_members[1]);
  save_directed(data.graphs.transitional, g + names[8]);

  nlohmann::json manifest;
  manifest["artifact_version"] = "0.1.0";
  manifest["kind"] = "prepared";
  manifest["dataset_path"] = opts.dataset_path;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "fnv1a:%016llx",
                static_cast<unsigned long long>(fnv1a_file(opts.dataset_path)));
  manifest["dataset_hash"] = hash;
  manifest["format"] = format_name(opts.format);
  manifest["seed"] = opts.cfg.seed;
  manifest["config"] = config_to_kv(opts.cfg);
  auto now = std::chrono::system_clock::now().time_since_epoch();
  manifest["created_unix"] =
      std::chrono::duration_cast<std::chrono::seconds>(now).count();
  std::size_t checkins = 0;
  for (const auto& t : data.trajectories) checkins += t.checkins.size();
  std::size_t train = 0;
  for (bool b : data.is_train) train += b;
  manifest["counts"] = {
      {"users", data.catalog.user_count()},
      {"pois", data.catalog.poi_count()},
      {"trajectories", data.trajectories.size()},
      {"windowed_checkins", checkins},
      {"train_trajectories", train},
      {"test_trajectories", data.trajectories.size() - train}};
  std::array<int, kScenarioCount> per_scenario{};
  for (const auto& l : data.labels) ++per_scenario[composite_id(l)];
  for (int s = 0; s < kScenarioCount; ++s)
    manifest["counts"]["scenario_" + scenario_name(s)] = per_scenario[s];

  std::ofstream mf(opts.out_dir + "/manifest.json");
  if (!mf) throw DataError("cannot write manifest.json");
  mf << manifest.dump(2) << "\n";
}

PreparedData load_prepared(const std::string& dir) {
  if (!fs::exists(dir + "/manifest.json"))
    throw ConfigError("not a prepared directory (missing manifest.json): " +
                      dir);
  PreparedData data;
  data.catalog = load_catalog(dir + "/catalog.tsv");
  data.centers = CityCenterSet::load(dir + "/centers.tsv");
  read_trajectories(data, dir + "/trajectories.tsv");

  std::ifstream sc(dir + "/scenarios.tsv");
  if (!sc) throw DataError("cannot open scenarios.tsv in " + dir);
  data.labels.assign(data.trajectories.size(), {});
  std::string line;
  while (std::getline(sc, line)) {
    if (line.empty()) continue;
    std::size_t id;
    int comp;
    if (std::sscanf(line.c_str(), "%zu\t%d", &id, &comp) != 2 ||
        id >= data.labels.size() || comp < 0 || comp >= kScenarioCount)
      throw DataError("malformed scenarios.tsv line in " + dir);
    data.labels[id] = decode_composite(comp);
  }

  data.user_types.assign(data.catalog.user_count(), UserType::local);
  for (std::size_t i = 0; i < data.trajectories.size(); ++i)
    data.user_types[data.trajectories[i].user] = data.labels[i].user_type;

  auto names = graph_file_names();
  const std::string g = dir + "/graphs/";
  data.graphs.collaborative[0] = load_hypergraph(g + names[0]);
  data.graphs.collaborative[1] = load_hypergraph(g + names[1]);
  data.graphs.temporal_user[0] = load_hypergraph(g + names[2]);
  data.graphs.temporal_user[1] = load_hypergraph(g + names[3]);
  data.graphs.temporal_poi[0] = load_hypergraph(g + names[4]);
  data.graphs.temporal_poi[1] = load_hypergraph(g + names[5]);
  data.graphs.geographical[0] =
      load_hypergraph(g + names[6], &data.graphs.geo_members[0]);
  data.graphs.geographical[1] =
      load_hypergraph(g + names[7], &data.graphs.geo_members[1]);
  data.graphs.transitional = load_directed(g + names[8]);
  return data;
}

std::unique_ptr<ModelBundle> load_model_bundle(const std::string& prepared_dir,
                                               const TrainConfig& cfg) {
  auto bundle = std::make_unique<ModelBundle>();
  bundle->data = load_prepared(prepared_dir);
  const GraphSet* graphs = &bundle->data.graphs;
  if (cfg.no_subgraph) {
    bundle->merged = build_graphs(
        bundle->data.trajectories, bundle->data.is_train, bundle->data.labels,
        bundle->data.catalog, bundle->data.centers, cfg.downtown_radius_km,
        cfg.geo_threshold_km, /*merged=*/true);
    bundle->merged_used = true;
    graphs = &bundle->merged;
  }
  bundle->model = make_model(*graphs, bundle->data.trajectories,
                             bundle->data.is_train, bundle->data.labels,
                             bundle->data.catalog.user_count(),
                             bundle->data.catalog.poi_count(), cfg);
  return bundle;
}

}  // namespace poirec
