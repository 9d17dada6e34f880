#pragma once

#include <array>
#include <string>
#include <vector>

#include "poirec/types.hpp"

namespace poirec {

enum class UserType : int { local = 0, tourist = 1 };
enum class TemporalContext : int { workday = 0, weekend = 1 };
enum class SpatialRegion : int { downtown = 0, suburban = 1 };

struct ScenarioLabel {
  UserType user_type = UserType::local;
  TemporalContext temporal = TemporalContext::workday;
  SpatialRegion spatial = SpatialRegion::downtown;

  bool operator==(const ScenarioLabel&) const = default;
};

constexpr int kScenarioCount = 8;

// id = 4*user_type + 2*temporal + spatial, in [0, 8).
int composite_id(const ScenarioLabel& label);
ScenarioLabel decode_composite(int id);
std::string scenario_name(int id);

struct CityCenter {
  std::string name;
  double lat = 0.0;
  double lon = 0.0;
};

struct CityCenterSet {
  std::vector<CityCenter> centers;

  // NYC and Tokyo, the two Foursquare cities.
  static CityCenterSet defaults();
  static CityCenterSet load(const std::string& path);
  void save(const std::string& path) const;
};

// Great-circle distance, Earth radius 6371.0 km.
double haversine_km(double lat_a, double lon_a, double lat_b, double lon_b);

extern const std::vector<std::string> kDefaultAccommodationCategories;

// Tourist iff accommodation check-ins strictly exceed `threshold` of the
// user's total check-ins. Category names match any accommodation keyword
// case-insensitively as a substring. A history with no category data
// always classifies local.
UserType classify_user(const std::vector<CheckIn>& history,
                       const Catalog& catalog, double threshold = 0.05,
                       const std::vector<std::string>& accommodation_categories =
                           kDefaultAccommodationCategories);

// Weekend iff the last input check-in (penultimate overall) falls on
// Saturday or Sunday in local time. Requires length >= 2.
TemporalContext classify_temporal(const Trajectory& trajectory);

// Downtown iff the last input check-in lies within `radius_km` of the
// nearest center (inclusive boundary). Requires length >= 2.
SpatialRegion classify_spatial(const Trajectory& trajectory,
                               const CityCenterSet& centers,
                               double radius_km = 10.0);

// Same 10 km rule applied to a bare location, used for POI region
// assignment.
SpatialRegion classify_point(double lat, double lon,
                             const CityCenterSet& centers,
                             double radius_km = 10.0);

}  // namespace poirec
