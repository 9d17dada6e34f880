#include "poirec/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace poirec {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

int month_from_name(const char* s) {
  static const char* names[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  for (int i = 0; i < 12; ++i)
    if (std::strncmp(s, names[i], 3) == 0) return i + 1;
  return -1;
}

// "Tue Apr 03 18:00:06 +0000 2012" -> UTC seconds
std::int64_t parse_foursquare_time(const std::string& s) {
  char dow[8], mon[8], sign;
  int day, hh, mm, ss, off, year;
  if (std::sscanf(s.c_str(), "%3s %3s %d %d:%d:%d %c%4d %d", dow, mon, &day,
                  &hh, &mm, &ss, &sign, &off, &year) != 9)
    throw DataError("unparseable time: " + s);
  int month = month_from_name(mon);
  if (month < 0 || (sign != '+' && sign != '-'))
    throw DataError("unparseable time: " + s);
  std::int64_t utc = days_from_civil(year, month, day) * kSecondsPerDay +
                     hh * 3600 + mm * 60 + ss;
  int off_min = (off / 100) * 60 + off % 100;
  if (sign == '-') off_min = -off_min;
  return utc - 60LL * off_min;
}

// "2010-10-19T23:55:27Z" -> UTC seconds
std::int64_t parse_iso8601(const std::string& s) {
  int year, month, day, hh, mm, ss;
  if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%d", &year, &month, &day, &hh,
                  &mm, &ss) != 6)
    throw DataError("unparseable time: " + s);
  return days_from_civil(year, month, day) * kSecondsPerDay + hh * 3600 +
         mm * 60 + ss;
}

struct RawCheckin {
  std::string user_id;
  std::string poi_id;
  std::string category;
  double lat = 0.0;
  double lon = 0.0;
  int tz_offset_min = 0;
  std::int64_t timestamp = 0;
};

RawCheckin parse_line(const std::string& line, const ParseOptions& opts,
                      int lineno) {
  auto fail = [&](const std::string& why) -> DataError {
    return DataError("line " + std::to_string(lineno) + ": " + why);
  };
  auto fields = split_tabs(line);
  RawCheckin r;
  try {
    if (opts.format == CheckinFormat::foursquare) {
      if (fields.size() != 8) throw fail("expected 8 tab-separated fields");
      r.user_id = fields[0];
      r.poi_id = fields[1];
      r.category = fields[3];
      r.lat = std::stod(fields[4]);
      r.lon = std::stod(fields[5]);
      r.tz_offset_min = std::stoi(fields[6]);
      r.timestamp = parse_foursquare_time(fields[7]);
    } else {
      if (fields.size() != 5) throw fail("expected 5 tab-separated fields");
      r.user_id = fields[0];
      r.timestamp = parse_iso8601(fields[1]);
      r.lat = std::stod(fields[2]);
      r.lon = std::stod(fields[3]);
      r.poi_id = fields[4];
      r.tz_offset_min = opts.default_tz_offset_min;
    }
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw fail(e.what());
  }
  if (r.user_id.empty() || r.poi_id.empty())
    throw fail("empty user or POI id");
  if (r.lat < -90 || r.lat > 90 || !std::isfinite(r.lat))
    throw fail("latitude out of range");
  if (r.lon < -180 || r.lon > 180 || !std::isfinite(r.lon))
    throw fail("longitude out of range");
  return r;
}

}  // namespace

CheckinFormat parse_format(const std::string& name) {
  if (name == "foursquare") return CheckinFormat::foursquare;
  if (name == "gowalla") return CheckinFormat::gowalla;
  throw ConfigError("unknown check-in format: " + name +
                    " (expected foursquare or gowalla)");
}

std::string format_name(CheckinFormat f) {
  return f == CheckinFormat::foursquare ? "foursquare" : "gowalla";
}

std::size_t ParseResult::total_checkins() const {
  std::size_t n = 0;
  for (const auto& v : checkins_by_user) n += v.size();
  return n;
}

ParseResult parse_checkins(const std::string& path, const ParseOptions& opts) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open check-in file: " + path);

  std::vector<RawCheckin> raw;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    raw.push_back(parse_line(line, opts, lineno));
  }

  if (opts.min_user_checkins > 0 || opts.min_poi_checkins > 0) {
    std::unordered_map<std::string, int> user_counts, poi_counts;
    for (const auto& r : raw) {
      ++user_counts[r.user_id];
      ++poi_counts[r.poi_id];
    }
    std::vector<RawCheckin> kept;
    kept.reserve(raw.size());
    for (auto& r : raw) {
      if (user_counts[r.user_id] >= opts.min_user_checkins &&
          poi_counts[r.poi_id] >= opts.min_poi_checkins)
        kept.push_back(std::move(r));
    }
    raw = std::move(kept);
  }

  ParseResult result;
  std::unordered_map<std::string, int> user_index, poi_index, category_index;
  std::vector<CheckIn> flat;
  flat.reserve(raw.size());
  for (const auto& r : raw) {
    CheckIn c;
    auto [uit, unew] = user_index.try_emplace(
        r.user_id, static_cast<int>(result.catalog.users.size()));
    if (unew) result.catalog.users.push_back({r.user_id});
    c.user = uit->second;

    int cat = -1;
    if (!r.category.empty()) {
      auto [cit, cnew] = category_index.try_emplace(
          r.category, static_cast<int>(result.catalog.categories.size()));
      if (cnew) result.catalog.categories.push_back(r.category);
      cat = cit->second;
    }

    auto [pit, pnew] = poi_index.try_emplace(
        r.poi_id, static_cast<int>(result.catalog.pois.size()));
    if (pnew) result.catalog.pois.push_back({r.poi_id, r.lat, r.lon, cat});
    c.poi = pit->second;
    c.timestamp = r.timestamp;
    c.lat = r.lat;
    c.lon = r.lon;
    c.tz_offset_min = r.tz_offset_min;
    c.category = cat;
    flat.push_back(c);
  }

  result.checkins_by_user.resize(result.catalog.users.size());
  for (const auto& c : flat) result.checkins_by_user[c.user].push_back(c);
  for (auto& v : result.checkins_by_user) {
    std::stable_sort(v.begin(), v.end(),
                     [](const CheckIn& a, const CheckIn& b) {
                       return a.timestamp < b.timestamp;
                     });
  }
  return result;
}

std::vector<Trajectory> segment_user(const std::vector<CheckIn>& sorted) {
  std::vector<Trajectory> out;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::int64_t anchor = sorted[i].timestamp;
    Trajectory t;
    t.user = sorted[i].user;
    t.window_start = anchor;
    while (i < sorted.size() && sorted[i].timestamp < anchor + kWindowSeconds)
      t.checkins.push_back(sorted[i++]);
    if (t.length() >= 2) out.push_back(std::move(t));
  }
  return out;
}

std::vector<Trajectory> segment_trajectories(
    const std::vector<std::vector<CheckIn>>& checkins_by_user) {
  std::vector<Trajectory> out;
  for (const auto& per_user : checkins_by_user) {
    auto t = segment_user(per_user);
    out.insert(out.end(), std::make_move_iterator(t.begin()),
               std::make_move_iterator(t.end()));
  }
  return out;
}

SplitResult chronological_split(const std::vector<Trajectory>& trajectories,
                                int user_count, double ratio) {
  if (ratio < 0.0 || ratio > 1.0)
    throw ConfigError("split ratio must lie in [0, 1]");
  std::vector<std::vector<int>> per_user(user_count);
  for (int i = 0; i < static_cast<int>(trajectories.size()); ++i)
    per_user[trajectories[i].user].push_back(i);

  SplitResult res;
  res.is_train.assign(trajectories.size(), false);
  for (auto& ids : per_user) {
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
      return trajectories[a].window_start < trajectories[b].window_start;
    });
    std::size_t n = ids.size();
    auto n_train = static_cast<std::size_t>(
        std::ceil(ratio * static_cast<double>(n) - 1e-9));
    n_train = std::min(n_train, n);
    for (std::size_t k = 0; k < n; ++k) {
      bool train = k < n_train;
      res.is_train[ids[k]] = train;
      (train ? res.train_count : res.test_count) += 1;
    }
  }
  return res;
}

void save_catalog(const Catalog& catalog, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write catalog: " + path);
  out << "users\t" << catalog.users.size() << "\n";
  out << "pois\t" << catalog.pois.size() << "\n";
  out << "slots\t" << Catalog::kTimeSlots << "\n";
  for (std::size_t i = 0; i < catalog.categories.size(); ++i)
    out << "C\t" << i << "\t" << catalog.categories[i] << "\n";
  for (std::size_t i = 0; i < catalog.users.size(); ++i)
    out << "U\t" << i << "\t" << catalog.users[i].external_id << "\n";
  char buf[64];
  for (std::size_t i = 0; i < catalog.pois.size(); ++i) {
    const auto& p = catalog.pois[i];
    out << "P\t" << i << "\t" << p.external_id << "\t";
    std::snprintf(buf, sizeof(buf), "%.17g\t%.17g", p.lat, p.lon);
    out << buf << "\t" << p.category << "\n";
  }
}

Catalog load_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open catalog: " + path);
  Catalog catalog;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    auto fail = [&](const std::string& why) -> DataError {
      return DataError("catalog " + path + " line " + std::to_string(lineno) +
                       ": " + why);
    };
    try {
      if (fields[0] == "users" || fields[0] == "pois" || fields[0] == "slots")
        continue;
      if (fields[0] == "C" && fields.size() == 3) {
        if (std::stoul(fields[1]) != catalog.categories.size())
          throw fail("category index out of order");
        catalog.categories.push_back(fields[2]);
      } else if (fields[0] == "U" && fields.size() == 3) {
        if (std::stoul(fields[1]) != catalog.users.size())
          throw fail("user index out of order");
        catalog.users.push_back({fields[2]});
      } else if (fields[0] == "P" && fields.size() == 6) {
        if (std::stoul(fields[1]) != catalog.pois.size())
          throw fail("poi index out of order");
        PoiRecord p;
        p.external_id = fields[2];
        p.lat = std::stod(fields[3]);
        p.lon = std::stod(fields[4]);
        p.category = std::stoi(fields[5]);
        catalog.pois.push_back(std::move(p));
      } else {
        throw fail("unrecognized record");
      }
    } catch (const DataError&) {
      throw;
    } catch (const std::exception& e) {
      throw fail(e.what());
    }
  }
  return catalog;
}

}  // namespace poirec
