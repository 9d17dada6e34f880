#include <doctest.h>

#include <random>

#include "poirec/evaluator.hpp"
#include "testutil.hpp"

using namespace poirec;

TEST_CASE("acc and mrr from ranks") {
  SUBCASE("rank three") {
    auto m = metrics_from_ranks({3});
    CHECK(m.acc1 == 0.0);
    CHECK(m.acc5 == 1.0);
    CHECK(m.mrr == doctest::Approx(1.0 / 3));
  }
  SUBCASE("all rank one") {
    auto m = metrics_from_ranks({1, 1, 1, 1});
    CHECK(m.acc1 == 1.0);
    CHECK(m.acc20 == 1.0);
    CHECK(m.mrr == 1.0);
  }
  SUBCASE("random rankings match a loop oracle") {
    std::mt19937_64 rng(251);
    std::vector<int> ranks;
    for (int i = 0; i < 100; ++i)
      ranks.push_back(1 + static_cast<int>(rng() % 40));
    auto m = metrics_from_ranks(ranks);
    double a1 = 0, a5 = 0, a10 = 0, a20 = 0, mrr = 0;
    for (int r : ranks) {
      a1 += r <= 1;
      a5 += r <= 5;
      a10 += r <= 10;
      a20 += r <= 20;
      mrr += 1.0 / r;
    }
    CHECK(m.acc1 == doctest::Approx(a1 / 100).epsilon(1e-12));
    CHECK(m.acc5 == doctest::Approx(a5 / 100).epsilon(1e-12));
    CHECK(m.acc10 == doctest::Approx(a10 / 100).epsilon(1e-12));
    CHECK(m.acc20 == doctest::Approx(a20 / 100).epsilon(1e-12));
    CHECK(m.mrr == doctest::Approx(mrr / 100).epsilon(1e-12));
  }
}

TEST_CASE("metric invariants on randomized fixtures") {
  std::mt19937_64 rng(257);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + static_cast<int>(rng() % 60);
    std::vector<int> ranks;
    for (int i = 0; i < n; ++i)
      ranks.push_back(1 + static_cast<int>(rng() % 100));
    auto m = metrics_from_ranks(ranks);
    CHECK(m.acc1 <= m.acc5);
    CHECK(m.acc5 <= m.acc10);
    CHECK(m.acc10 <= m.acc20);
    CHECK(m.acc20 <= 1.0);
    CHECK(m.mrr >= m.acc1);
    CHECK(m.mrr <= 1.0);
  }
}

TEST_CASE("slice report") {
  SUBCASE("absent slices are omitted") {
    std::vector<int> ranks = {1, 2};
    std::vector<int> scenarios = {0, 2};  // both local
    auto report = slice_report(ranks, scenarios);
    CHECK(report.slices.count("local") == 1);
    CHECK(report.slices.count("tourist") == 0);
    CHECK(report.slices.at("overall").count == 2);
  }
  SUBCASE("weighted slice metrics reproduce the overall") {
    std::mt19937_64 rng(263);
    for (int trial = 0; trial < 50; ++trial) {
      int n = 5 + static_cast<int>(rng() % 200);
      std::vector<int> ranks, scenarios;
      for (int i = 0; i < n; ++i) {
        ranks.push_back(1 + static_cast<int>(rng() % 30));
        scenarios.push_back(static_cast<int>(rng() % 8));
      }
      auto report = slice_report(ranks, scenarios);
      const auto& overall = report.slices.at("overall");
      // local + tourist decompose the corpus
      double weighted = 0;
      int count = 0;
      for (const char* slice : {"local", "tourist"}) {
        auto it = report.slices.find(slice);
        if (it == report.slices.end()) continue;
        weighted += it->second.acc5 * it->second.count;
        count += it->second.count;
      }
      REQUIRE(count == overall.count);
      CHECK(weighted / count == doctest::Approx(overall.acc5).epsilon(1e-9));
      // composite slices also decompose it
      weighted = 0;
      count = 0;
      for (int s = 0; s < 8; ++s) {
        auto it = report.slices.find(scenario_name(s));
        if (it == report.slices.end()) continue;
        weighted += it->second.mrr * it->second.count;
        count += it->second.count;
      }
      REQUIRE(count == overall.count);
      CHECK(weighted / count == doctest::Approx(overall.mrr).epsilon(1e-9));
    }
  }
  SUBCASE("group-by oracle over a random corpus") {
    std::mt19937_64 rng(269);
    std::vector<int> ranks, scenarios;
    for (int i = 0; i < 300; ++i) {
      ranks.push_back(1 + static_cast<int>(rng() % 25));
      scenarios.push_back(static_cast<int>(rng() % 8));
    }
    auto report = slice_report(ranks, scenarios);
    for (int s = 0; s < 8; ++s) {
      std::vector<int> subset;
      for (std::size_t i = 0; i < ranks.size(); ++i)
        if (scenarios[i] == s) subset.push_back(ranks[i]);
      if (subset.empty()) {
        CHECK(report.slices.count(scenario_name(s)) == 0);
        continue;
      }
      auto want = metrics_from_ranks(subset);
      const auto& got = report.slices.at(scenario_name(s));
      CHECK(got.count == want.count);
      CHECK(got.acc10 == doctest::Approx(want.acc10).epsilon(1e-12));
      CHECK(got.mrr == doctest::Approx(want.mrr).epsilon(1e-12));
    }
  }
}

namespace {

EvalOutput fake_eval(const std::vector<int>& top1,
                     const std::vector<int>& targets,
                     const std::vector<int>& scenarios) {
  EvalOutput e;
  for (std::size_t i = 0; i < top1.size(); ++i) {
    e.traj_ids.push_back(static_cast<int>(i));
    e.scenario_ids.push_back(scenarios[i]);
    e.targets.push_back(targets[i]);
    e.ranks.push_back(top1[i] == targets[i] ? 1 : 2);
    e.topk.push_back({top1[i]});
    e.topk_scores.push_back({1.0});
  }
  return e;
}

Catalog small_catalog() {
  Catalog cat;
  cat.categories = {"Food", "Museum", "Hotel"};
  for (int p = 0; p < 6; ++p)
    cat.pois.push_back({"p" + std::to_string(p), 40.0 + 0.01 * p, -74.0,
                        p % 3});
  return cat;
}

}  // namespace

TEST_CASE("category delta") {
  Catalog cat = small_catalog();
  SUBCASE("perfect predictions give zero deltas") {
    auto e = fake_eval({0, 1, 2, 3}, {0, 1, 2, 3}, {0, 0, 4, 4});
    auto delta = category_delta(cat, e);
    REQUIRE(delta.available);
    for (const auto& [slice, cats] : delta.deltas)
      for (const auto& [cat_id, d] : cats)
        CHECK(d == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("single predicted category delta equals 1 - true share") {
    // all local predictions land in category 0 (POIs 0 and 3)
    auto e = fake_eval({0, 3, 0}, {0, 1, 2}, {0, 0, 0});
    auto delta = category_delta(cat, e);
    const auto& local = delta.deltas.at("local");
    CHECK(local.at(0) == doctest::Approx(1.0 - 1.0 / 3).epsilon(1e-12));
    CHECK(local.at(1) == doctest::Approx(-1.0 / 3).epsilon(1e-12));
  }
  SUBCASE("deltas sum to zero per slice") {
    std::mt19937_64 rng(271);
    std::vector<int> top1, targets, scen;
    for (int i = 0; i < 60; ++i) {
      top1.push_back(static_cast<int>(rng() % 6));
      targets.push_back(static_cast<int>(rng() % 6));
      scen.push_back(static_cast<int>(rng() % 8));
    }
    auto delta = category_delta(cat, fake_eval(top1, targets, scen));
    for (const auto& [slice, cats] : delta.deltas) {
      double sum = 0;
      for (const auto& [cat_id, d] : cats) sum += d;
      CHECK(sum == doctest::Approx(0.0).epsilon(1e-9));
    }
  }
  SUBCASE("no categories means unavailable") {
    Catalog bare;
    bare.pois = cat.pois;
    bare.categories.clear();
    auto delta = category_delta(bare, fake_eval({0}, {1}, {0}));
    CHECK_FALSE(delta.available);
  }
}

TEST_CASE("distance histogram") {
  Catalog cat = small_catalog();
  std::vector<Trajectory> ts;
  for (int i = 0; i < 4; ++i) {
    Trajectory t;
    t.user = 0;
    for (int k = 0; k < 3; ++k) {
      CheckIn c;
      c.poi = k;
      c.lat = cat.pois[k].lat;
      c.lon = cat.pois[k].lon;
      c.timestamp = k;
      t.checkins.push_back(c);
    }
    ts.push_back(t);
  }
  SUBCASE("identical predictions coincide with truth") {
    auto e = fake_eval({2, 2, 2, 2}, {2, 2, 2, 2}, {0, 1, 0, 1});
    auto hist = distance_histogram(cat, ts, e);
    for (const auto& [slice, series] : hist.series) {
      double sp = 0, st = 0;
      for (std::size_t b = 0; b < series[0].size(); ++b) {
        CHECK(series[0][b] == doctest::Approx(series[1][b]).epsilon(1e-12));
        sp += series[0][b];
        st += series[1][b];
      }
      CHECK(sp == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(st == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("counting oracle for bin masses") {
    auto e = fake_eval({0, 5, 3, 1}, {2, 2, 2, 2}, {0, 0, 1, 1});
    auto hist = distance_histogram(cat, ts, e);
    const auto& overall = hist.series.at("overall");
    for (std::size_t i = 0; i < 4; ++i) {
      const CheckIn& last = ts[i].penultimate();
      double km = haversine_km(last.lat, last.lon, cat.pois[e.topk[i][0]].lat,
                               cat.pois[e.topk[i][0]].lon);
      int bin = 0;
      for (int b = 5; b >= 0; --b)
        if (km >= hist.edges[b]) {
          bin = b;
          break;
        }
      CHECK(overall[0][bin] > 0.0);
    }
  }
}

TEST_CASE("report json and predictions files") {
  std::string dir = testutil::temp_dir("evalout");
  auto e = fake_eval({0, 1}, {0, 2}, {0, 4});
  save_report_json(e.report, dir + "/report.json");  // empty report is fine
  auto report = slice_report(e.ranks, e.scenario_ids);
  save_report_json(report, dir + "/report.json");
  save_predictions_tsv(e, dir + "/predictions.tsv");
  std::ifstream in(dir + "/predictions.tsv");
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "0\t1\t0\t1");
}
