#include "poirec/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace poirec {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

SliceMetrics metrics_from_ranks(const std::vector<int>& ranks) {
  SliceMetrics m;
  m.count = static_cast<int>(ranks.size());
  if (ranks.empty()) return m;
  for (int r : ranks) {
    if (r <= 1) m.acc1 += 1;
    if (r <= 5) m.acc5 += 1;
    if (r <= 10) m.acc10 += 1;
    if (r <= 20) m.acc20 += 1;
    m.mrr += 1.0 / r;
  }
  m.acc1 /= m.count;
  m.acc5 /= m.count;
  m.acc10 /= m.count;
  m.acc20 /= m.count;
  m.mrr /= m.count;
  return m;
}

MetricsReport slice_report(const std::vector<int>& ranks,
                           const std::vector<int>& scenario_ids) {
  MetricsReport report;
  auto collect = [&](const std::string& name, auto pred) {
    std::vector<int> subset;
    for (std::size_t i = 0; i < ranks.size(); ++i)
      if (pred(decode_composite(scenario_ids[i]))) subset.push_back(ranks[i]);
    if (!subset.empty()) report.slices[name] = metrics_from_ranks(subset);
  };
  collect("overall", [](const ScenarioLabel&) { return true; });
  collect("local", [](const ScenarioLabel& l) {
    return l.user_type == UserType::local;
  });
  collect("tourist", [](const ScenarioLabel& l) {
    return l.user_type == UserType::tourist;
  });
  collect("workday", [](const ScenarioLabel& l) {
    return l.temporal == TemporalContext::workday;
  });
  collect("weekend", [](const ScenarioLabel& l) {
    return l.temporal == TemporalContext::weekend;
  });
  collect("downtown", [](const ScenarioLabel& l) {
    return l.spatial == SpatialRegion::downtown;
  });
  collect("suburban", [](const ScenarioLabel& l) {
    return l.spatial == SpatialRegion::suburban;
  });
  for (int s = 0; s < kScenarioCount; ++s) {
    collect(scenario_name(s), [s](const ScenarioLabel& l) {
      return composite_id(l) == s;
    });
  }
  return report;
}

EvalOutput evaluate(const Model& model,
                    const std::vector<Trajectory>& trajectories,
                    const std::vector<bool>& is_train,
                    const std::vector<ScenarioLabel>& labels) {
  EvalOutput out;
  std::array<bool, kScenarioCount> needed{};
  for (std::size_t i = 0; i < trajectories.size(); ++i)
    if (!is_train[i]) needed[composite_id(labels[i])] = true;
  std::array<SceneEmbeddings, kScenarioCount> scenes;
  for (int s = 0; s < kScenarioCount; ++s)
    if (needed[s]) scenes[s] = compute_scene(model, s);

  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    if (is_train[i]) continue;
    const Trajectory& t = trajectories[i];
    int sid = composite_id(labels[i]);
    auto scores = score_trajectory(scenes[sid], t, model.poi_count);
    out.traj_ids.push_back(static_cast<int>(i));
    out.scenario_ids.push_back(sid);
    out.targets.push_back(t.target().poi);
    out.ranks.push_back(rank_of(scores, t.target().poi));
    auto best = top_k(scores, 20);
    std::vector<double> bs;
    bs.reserve(best.size());
    for (int p : best) bs.push_back(scores[p]);
    out.topk.push_back(std::move(best));
    out.topk_scores.push_back(std::move(bs));
  }
  out.report = slice_report(out.ranks, out.scenario_ids);
  return out;
}

CategoryDelta category_delta(const Catalog& catalog, const EvalOutput& eval) {
  CategoryDelta result;
  if (catalog.categories.empty()) return result;  // gowalla: no categories

  for (const std::string slice : {"local", "tourist"}) {
    bool want_local = slice == "local";
    std::map<int, double> pred, truth;
    int n = 0;
    for (std::size_t i = 0; i < eval.ranks.size(); ++i) {
      ScenarioLabel l = decode_composite(eval.scenario_ids[i]);
      if ((l.user_type == UserType::local) != want_local) continue;
      ++n;
      ++pred[catalog.pois[eval.topk[i][0]].category];
      ++truth[catalog.pois[eval.targets[i]].category];
    }
    if (n == 0) continue;
    std::map<int, double> delta;
    for (auto& [cat, c] : pred) delta[cat] += c / n;
    for (auto& [cat, c] : truth) delta[cat] -= c / n;
    result.deltas[slice] = std::move(delta);
  }
  result.available = !result.deltas.empty();
  return result;
}

DistanceHistogram distance_histogram(
    const Catalog& catalog, const std::vector<Trajectory>& trajectories,
    const EvalOutput& eval) {
  DistanceHistogram hist;
  int bins = static_cast<int>(hist.edges.size());
  auto bin_of = [&](double km) {
    for (int b = bins - 1; b >= 0; --b)
      if (km >= hist.edges[b]) return b;
    return 0;
  };
  for (const std::string slice : {"overall", "downtown", "suburban"}) {
    std::vector<double> pred(bins, 0.0), truth(bins, 0.0);
    int n = 0;
    for (std::size_t i = 0; i < eval.ranks.size(); ++i) {
      ScenarioLabel l = decode_composite(eval.scenario_ids[i]);
      if (slice == "downtown" && l.spatial != SpatialRegion::downtown)
        continue;
      if (slice == "suburban" && l.spatial != SpatialRegion::suburban)
        continue;
      const Trajectory& t = trajectories[eval.traj_ids[i]];
      const CheckIn& last = t.penultimate();
      const PoiRecord& p = catalog.pois[eval.topk[i][0]];
      const PoiRecord& g = catalog.pois[eval.targets[i]];
      pred[bin_of(haversine_km(last.lat, last.lon, p.lat, p.lon))] += 1;
      truth[bin_of(haversine_km(last.lat, last.lon, g.lat, g.lon))] += 1;
      ++n;
    }
    if (n == 0) continue;
    for (auto& v : pred) v /= n;
    for (auto& v : truth) v /= n;
    hist.series[slice] = {std::move(pred), std::move(truth)};
  }
  return hist;
}

void save_report_json(const MetricsReport& report, const std::string& path) {
  nlohmann::json j;
  for (const auto& [name, m] : report.slices) {
    j[name] = {{"acc1", m.acc1},   {"acc5", m.acc5}, {"acc10", m.acc10},
               {"acc20", m.acc20}, {"mrr", m.mrr},   {"count", m.count}};
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write report: " + path);
  out << j.dump(2) << "\n";
}

void save_predictions_tsv(const EvalOutput& eval, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write predictions: " + path);
  for (std::size_t i = 0; i < eval.traj_ids.size(); ++i) {
    for (std::size_t k = 0; k < eval.topk[i].size(); ++k) {
      out << eval.traj_ids[i] << "\t" << (k + 1) << "\t" << eval.topk[i][k]
          << "\t" << fmt17(eval.topk_scores[i][k]) << "\n";
    }
  }
}

namespace {

// Minimal grouped bar chart, two series per group.
void write_svg_bars(const std::string& path, const std::string& title,
                    const std::vector<std::string>& groups,
                    const std::array<std::string, 2>& series_names,
                    const std::vector<std::array<double, 2>>& values) {
  int n = static_cast<int>(groups.size());
  int width = std::max(360, 60 * n + 120);
  int height = 300;
  int base = height - 60;
  double vmax = 1e-12;
  for (const auto& v : values)
    vmax = std::max({vmax, std::fabs(v[0]), std::fabs(v[1])});
  double scale = 180.0 / vmax;

  std::ofstream out(path);
  if (!out) throw DataError("cannot write plot: " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "'>\n";
  out << "<text x='10' y='20' font-size='14'>" << title << "</text>\n";
  out << "<rect x='10' y='30' width='10' height='10' fill='#4477aa'/>"
      << "<text x='24' y='39' font-size='11'>" << series_names[0]
      << "</text>\n";
  out << "<rect x='110' y='30' width='10' height='10' fill='#ee6677'/>"
      << "<text x='124' y='39' font-size='11'>" << series_names[1]
      << "</text>\n";
  out << "<line x1='40' y1='" << base << "' x2='" << (width - 20) << "' y2='"
      << base << "' stroke='black'/>\n";
  for (int i = 0; i < n; ++i) {
    int x = 50 + i * 60;
    for (int s = 0; s < 2; ++s) {
      double v = values[i][s];
      int h = static_cast<int>(std::fabs(v) * scale);
      int y = v >= 0 ? base - h : base;
      out << "<rect x='" << (x + s * 22) << "' y='" << y
          << "' width='20' height='" << h << "' fill='"
          << (s == 0 ? "#4477aa" : "#ee6677") << "'/>\n";
    }
    out << "<text x='" << x << "' y='" << (base + 16)
        << "' font-size='10'>" << groups[i] << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace

void save_category_delta(const CategoryDelta& delta, const Catalog& catalog,
                         const std::string& csv_path,
                         const std::string& svg_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw DataError("cannot write category deltas: " + csv_path);
  csv << "slice,category,delta\n";
  for (const auto& [slice, cats] : delta.deltas)
    for (const auto& [cat, d] : cats)
      csv << slice << "," << catalog.category_name(cat) << "," << fmt17(d)
          << "\n";

  // Plot the largest local-vs-tourist deltas side by side.
  std::map<int, std::array<double, 2>> merged;
  int s = 0;
  for (const auto& [slice, cats] : delta.deltas) {
    for (const auto& [cat, d] : cats) merged[cat][s] = d;
    if (++s >= 2) break;
  }
  std::vector<std::pair<int, std::array<double, 2>>> rows(merged.begin(),
                                                          merged.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    double ma = std::max(std::fabs(a.second[0]), std::fabs(a.second[1]));
    double mb = std::max(std::fabs(b.second[0]), std::fabs(b.second[1]));
    return ma > mb;
  });
  if (rows.size() > 8) rows.resize(8);
  std::vector<std::string> groups;
  std::vector<std::array<double, 2>> values;
  for (const auto& [cat, v] : rows) {
    std::string name = catalog.category_name(cat);
    if (name.size() > 9) name.resize(9);
    groups.push_back(name.empty() ? "(none)" : name);
    values.push_back(v);
  }
  write_svg_bars(svg_path, "category proportion delta", groups,
                 {"local", "tourist"}, values);
}

void save_distance_histogram(const DistanceHistogram& hist,
                             const std::string& csv_path,
                             const std::string& svg_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw DataError("cannot write distance histogram: " + csv_path);
  csv << "slice,series,bin_low_km,mass\n";
  for (const auto& [slice, series] : hist.series) {
    for (int s = 0; s < 2; ++s) {
      for (std::size_t b = 0; b < hist.edges.size(); ++b) {
        csv << slice << "," << (s == 0 ? "predicted" : "truth") << ","
            << hist.edges[b] << "," << fmt17(series[s][b]) << "\n";
      }
    }
  }
  auto it = hist.series.find("overall");
  if (it == hist.series.end() && !hist.series.empty())
    it = hist.series.begin();
  if (it != hist.series.end()) {
    std::vector<std::string> groups;
    std::vector<std::array<double, 2>> values;
    for (std::size_t b = 0; b < hist.edges.size(); ++b) {
      std::string label = std::to_string(static_cast<int>(hist.edges[b]));
      label += b + 1 < hist.edges.size()
                   ? "-" + std::to_string(static_cast<int>(hist.edges[b + 1]))
                   : "+";
      groups.push_back(label);
      values.push_back({it->second[0][b], it->second[1][b]});
    }
    write_svg_bars(svg_path, "next-POI distance (" + it->first + ", km)",
                   groups, {"predicted", "truth"}, values);
  }
}

}  // namespace poirec
