#include <doctest.h>

#include <fstream>
#include <random>

#include "poirec/ingest.hpp"
#include "testutil.hpp"

using namespace poirec;

namespace {

std::string write_file(const std::string& name, const std::string& body) {
  static std::string dir = testutil::temp_dir("ingest");
  std::string path = dir + "/" + name;
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("single foursquare line") {
  auto path = write_file(
      "one.tsv", testutil::foursquare_line("470", "49bbd6c0f964a520f4531fe3",
                                           "Bar", 40.7, -74.0, -240,
                                           1333475000));
  ParseOptions opts;
  auto res = parse_checkins(path, opts);
  CHECK(res.catalog.user_count() == 1);
  CHECK(res.catalog.poi_count() == 1);
  CHECK(res.total_checkins() == 1);
  const CheckIn& c = res.checkins_by_user[0][0];
  CHECK(c.timestamp == 1333475000);
  CHECK(c.tz_offset_min == -240);
  CHECK(c.lat == doctest::Approx(40.7));
  CHECK(res.catalog.categories[c.category] == "Bar");
}

TEST_CASE("two lines sharing a venue dedupe into one POI") {
  auto path = write_file(
      "two.tsv",
      testutil::foursquare_line("a", "venue1", "Bar", 40.7, -74.0, 0, 1000) +
          testutil::foursquare_line("b", "venue1", "Bar", 40.7, -74.0, 0,
                                    2000));
  auto res = parse_checkins(path, ParseOptions{});
  CHECK(res.catalog.poi_count() == 1);
  CHECK(res.catalog.user_count() == 2);
}

TEST_CASE("malformed line reports its number") {
  auto path = write_file(
      "bad.tsv",
      testutil::foursquare_line("a", "v", "Bar", 40.7, -74.0, 0, 1000) +
          "not\ta\tvalid\tline\n");
  try {
    parse_checkins(path, ParseOptions{});
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("latitude range enforced") {
  auto path = write_file(
      "range.tsv",
      testutil::foursquare_line("a", "v", "Bar", 91.0, -74.0, 0, 1000));
  CHECK_THROWS_AS(parse_checkins(path, ParseOptions{}), DataError);
}

TEST_CASE("unknown format name") {
  CHECK_THROWS_AS(parse_format("checkinzilla"), ConfigError);
  CHECK(parse_format("gowalla") == CheckinFormat::gowalla);
}

TEST_CASE("gowalla line with configured offset") {
  auto path =
      write_file("gow.tsv", "10\t2010-10-19T23:55:27Z\t30.26\t-97.74\t420315\n");
  ParseOptions opts;
  opts.format = CheckinFormat::gowalla;
  opts.default_tz_offset_min = -480;
  auto res = parse_checkins(path, opts);
  REQUIRE(res.total_checkins() == 1);
  const CheckIn& c = res.checkins_by_user[0][0];
  CHECK(c.tz_offset_min == -480);
  CHECK(c.category == -1);
  CHECK(res.catalog.categories.empty());
  // 2010-10-19 23:55:27 UTC
  CHECK(c.timestamp == days_from_civil(2010, 10, 19) * 86400 + 23 * 3600 +
                           55 * 60 + 27);
}

TEST_CASE("frequency filters drop rare users and POIs") {
  std::string body;
  for (int i = 0; i < 5; ++i)
    body += testutil::foursquare_line("busy", "v" + std::to_string(i % 2),
                                      "Bar", 40, -74, 0, 1000 + i);
  body += testutil::foursquare_line("once", "v9", "Bar", 40, -74, 0, 9000);
  auto path = write_file("filter.tsv", body);
  ParseOptions opts;
  opts.min_user_checkins = 2;
  opts.min_poi_checkins = 2;
  auto res = parse_checkins(path, opts);
  CHECK(res.catalog.user_count() == 1);
  CHECK(res.catalog.poi_count() == 2);
  CHECK(res.total_checkins() == 5);
}

TEST_CASE("window segmentation") {
  auto ci = [](std::int64_t ts) {
    CheckIn c;
    c.user = 0;
    c.poi = 0;
    c.timestamp = ts;
    return c;
  };
  SUBCASE("gap-tolerant anchoring drops short second window") {
    std::vector<CheckIn> cs = {ci(0), ci(5 * 3600), ci(30 * 3600)};
    auto t = segment_user(cs);
    REQUIRE(t.size() == 1);
    CHECK(t[0].length() == 2);
    CHECK(t[0].window_start == 0);
  }
  SUBCASE("boundary inclusion at 23:59") {
    std::vector<CheckIn> cs = {ci(0), ci(23 * 3600 + 59 * 60)};
    auto t = segment_user(cs);
    REQUIRE(t.size() == 1);
    CHECK(t[0].length() == 2);
  }
  SUBCASE("exactly 24h starts a new window") {
    std::vector<CheckIn> cs = {ci(0), ci(3600), ci(24 * 3600), ci(25 * 3600)};
    auto t = segment_user(cs);
    REQUIRE(t.size() == 2);
    CHECK(t[1].window_start == 24 * 3600);
  }
}

TEST_CASE("segmentation matches an independent window scan") {
  // Oracle: replay the stream, opening a window at each first check-in
  // past the previous window's end, and count windows of size >= 2.
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<CheckIn>> users(100);
    std::size_t total = 0;
    for (int u = 0; u < 100; ++u) {
      std::int64_t t = 0;
      int n = static_cast<int>(rng() % 40);
      for (int i = 0; i < n; ++i) {
        t += static_cast<std::int64_t>(rng() % (36 * 3600));
        CheckIn c;
        c.user = u;
        c.poi = 0;
        c.timestamp = t;
        users[u].push_back(c);
      }
      total += users[u].size();
    }

    std::size_t oracle_kept = 0;
    std::size_t oracle_covered = 0;
    for (const auto& cs : users) {
      std::size_t i = 0;
      while (i < cs.size()) {
        std::int64_t end = cs[i].timestamp + 86400;
        std::size_t len = 0;
        while (i < cs.size() && cs[i].timestamp < end) {
          ++i;
          ++len;
        }
        oracle_covered += len;
        if (len >= 2) ++oracle_kept;
      }
    }
    // partition property: every check-in falls in exactly one window
    CHECK(oracle_covered == total);

    auto trajectories = segment_trajectories(users);
    CHECK(trajectories.size() == oracle_kept);
    std::size_t kept_checkins = 0;
    for (const auto& t : trajectories) kept_checkins += t.checkins.size();
    CHECK(kept_checkins <= total);
  }
}

TEST_CASE("chronological split") {
  auto traj = [](int user, std::int64_t start) {
    Trajectory t;
    t.user = user;
    t.window_start = start;
    t.checkins.resize(2);
    return t;
  };
  SUBCASE("five trajectories give 4/1") {
    std::vector<Trajectory> ts;
    for (int i = 0; i < 5; ++i) ts.push_back(traj(0, i * 86400));
    auto split = chronological_split(ts, 1, 0.8);
    CHECK(split.train_count == 4);
    CHECK(split.test_count == 1);
    CHECK_FALSE(split.is_train[4]);
  }
  SUBCASE("single trajectory goes to train") {
    std::vector<Trajectory> ts = {traj(0, 0)};
    auto split = chronological_split(ts, 1, 0.8);
    CHECK(split.train_count == 1);
    CHECK(split.test_count == 0);
  }
  SUBCASE("per-user split monotone in time") {
    std::mt19937_64 rng(13);
    std::vector<Trajectory> ts;
    for (int u = 0; u < 30; ++u) {
      int n = 1 + static_cast<int>(rng() % 12);
      for (int i = 0; i < n; ++i)
        ts.push_back(traj(u, static_cast<std::int64_t>(rng() % 1000000)));
    }
    auto split = chronological_split(ts, 30, 0.8);
    for (int u = 0; u < 30; ++u) {
      std::int64_t max_train = -1, min_test = -1;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i].user != u) continue;
        if (split.is_train[i])
          max_train = std::max(max_train, ts[i].window_start);
        else
          min_test = min_test < 0 ? ts[i].window_start
                                  : std::min(min_test, ts[i].window_start);
      }
      if (max_train >= 0 && min_test >= 0) CHECK(max_train <= min_test);
    }
  }
}

TEST_CASE("catalog round trip reproduces index assignments") {
  std::string body;
  std::mt19937_64 rng(29);
  for (int i = 0; i < 50; ++i) {
    body += testutil::foursquare_line(
        "u" + std::to_string(rng() % 9), "v" + std::to_string(rng() % 17),
        "Cat" + std::to_string(rng() % 4), 40 + 0.001 * (rng() % 100),
        -74 + 0.001 * (rng() % 100), 0, 1000 + i * 100);
  }
  auto path = write_file("roundtrip.tsv", body);
  auto res = parse_checkins(path, ParseOptions{});
  std::string dir = testutil::temp_dir("catalog");
  save_catalog(res.catalog, dir + "/catalog.tsv");
  Catalog loaded = load_catalog(dir + "/catalog.tsv");
  REQUIRE(loaded.user_count() == res.catalog.user_count());
  REQUIRE(loaded.poi_count() == res.catalog.poi_count());
  REQUIRE(loaded.categories == res.catalog.categories);
  for (int i = 0; i < loaded.user_count(); ++i)
    CHECK(loaded.users[i].external_id == res.catalog.users[i].external_id);
  for (int i = 0; i < loaded.poi_count(); ++i) {
    CHECK(loaded.pois[i].external_id == res.catalog.pois[i].external_id);
    CHECK(loaded.pois[i].lat == res.catalog.pois[i].lat);
    CHECK(loaded.pois[i].lon == res.catalog.pois[i].lon);
    CHECK(loaded.pois[i].category == res.catalog.pois[i].category);
  }
}
