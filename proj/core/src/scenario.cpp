#include "poirec/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace poirec {

namespace {

constexpr double kEarthRadiusKm = 6371.0;
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

int composite_id(const ScenarioLabel& label) {
  return 4 * static_cast<int>(label.user_type) +
         2 * static_cast<int>(label.temporal) +
         static_cast<int>(label.spatial);
}

ScenarioLabel decode_composite(int id) {
  ScenarioLabel l;
  l.user_type = static_cast<UserType>((id >> 2) & 1);
  l.temporal = static_cast<TemporalContext>((id >> 1) & 1);
  l.spatial = static_cast<SpatialRegion>(id & 1);
  return l;
}

std::string scenario_name(int id) {
  ScenarioLabel l = decode_composite(id);
  std::string s;
  s += l.user_type == UserType::local ? "local" : "tourist";
  s += l.temporal == TemporalContext::workday ? "_workday" : "_weekend";
  s += l.spatial == SpatialRegion::downtown ? "_downtown" : "_suburban";
  return s;
}

CityCenterSet CityCenterSet::defaults() {
  return {{{"new_york", 40.7128, -74.0060}, {"tokyo", 35.6895, 139.6917}}};
}

CityCenterSet CityCenterSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open centers file: " + path);
  CityCenterSet set;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    CityCenter c;
    if (!std::getline(ss, c.name, '\t') || !(ss >> c.lat)) {
      throw DataError("centers file " + path + " line " +
                      std::to_string(lineno) + ": expected name\\tlat\\tlon");
    }
    ss.ignore(1);
    if (!(ss >> c.lon)) {
      throw DataError("centers file " + path + " line " +
                      std::to_string(lineno) + ": expected name\\tlat\\tlon");
    }
    if (c.lat < -90 || c.lat > 90 || c.lon < -180 || c.lon > 180) {
      throw DataError("centers file " + path + " line " +
                      std::to_string(lineno) + ": coordinates out of range");
    }
    set.centers.push_back(std::move(c));
  }
  if (set.centers.empty())
    throw ConfigError("centers file " + path + " contains no centers");
  return set;
}

void CityCenterSet::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write centers file: " + path);
  char buf[128];
  for (const auto& c : centers) {
    std::snprintf(buf, sizeof(buf), "%s\t%.17g\t%.17g\n", c.name.c_str(),
                  c.lat, c.lon);
    out << buf;
  }
}

double haversine_km(double lat_a, double lon_a, double lat_b, double lon_b) {
  double phi_a = lat_a * kDegToRad;
  double phi_b = lat_b * kDegToRad;
  double dphi = (lat_b - lat_a) * kDegToRad;
  double dlam = (lon_b - lon_a) * kDegToRad;
  double s1 = std::sin(dphi / 2);
  double s2 = std::sin(dlam / 2);
  double h = s1 * s1 + std::cos(phi_a) * std::cos(phi_b) * s2 * s2;
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

const std::vector<std::string> kDefaultAccommodationCategories = {
    "hotel", "hostel", "motel", "resort", "bed & breakfast"};

UserType classify_user(const std::vector<CheckIn>& history,
                       const Catalog& catalog, double threshold,
                       const std::vector<std::string>& accommodation_categories) {
  if (history.empty()) return UserType::local;
  std::vector<std::string> keywords;
  keywords.reserve(accommodation_categories.size());
  for (const auto& k : accommodation_categories) keywords.push_back(to_lower(k));

  std::size_t accommodation = 0;
  for (const auto& c : history) {
    if (c.category < 0) continue;
    std::string name = to_lower(catalog.category_name(c.category));
    for (const auto& k : keywords) {
      if (!k.empty() && name.find(k) != std::string::npos) {
        ++accommodation;
        break;
      }
    }
  }
  double share = static_cast<double>(accommodation) /
                 static_cast<double>(history.size());
  return share > threshold ? UserType::tourist : UserType::local;
}

TemporalContext classify_temporal(const Trajectory& trajectory) {
  if (trajectory.length() < 2)
    throw DataError("classify_temporal requires trajectory length >= 2");
  int dow = day_of_week_local(trajectory.penultimate());
  return (dow == 0 || dow == 6) ? TemporalContext::weekend
                                : TemporalContext::workday;
}

SpatialRegion classify_point(double lat, double lon,
                             const CityCenterSet& centers, double radius_km) {
  if (centers.centers.empty())
    throw ConfigError("city center set is empty");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : centers.centers)
    best = std::min(best, haversine_km(lat, lon, c.lat, c.lon));
  return best <= radius_km ? SpatialRegion::downtown : SpatialRegion::suburban;
}

SpatialRegion classify_spatial(const Trajectory& trajectory,
                               const CityCenterSet& centers,
                               double radius_km) {
  if (trajectory.length() < 2)
    throw DataError("classify_spatial requires trajectory length >= 2");
  const CheckIn& c = trajectory.penultimate();
  return classify_point(c.lat, c.lon, centers, radius_km);
}

}  // namespace poirec
