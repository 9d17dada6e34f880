#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace poirec {

// Usage/configuration problems (bad flags, malformed config, missing
// required inputs). The CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent data encountered at runtime. Exit code 1.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckIn {
  int user = -1;
  int poi = -1;
  std::int64_t timestamp = 0;  // UTC seconds
  double lat = 0.0;
  double lon = 0.0;
  int tz_offset_min = 0;  // local time = timestamp + 60*tz_offset_min
  int category = -1;      // index into Catalog::categories, -1 if absent
};

// One user's check-ins inside a single 24-hour window. The last check-in
// is the prediction target; everything before it is the input prefix.
struct Trajectory {
  int user = -1;
  std::int64_t window_start = 0;
  std::vector<CheckIn> checkins;

  int length() const { return static_cast<int>(checkins.size()); }
  const CheckIn& target() const { return checkins.back(); }
  // Last input check-in (the one preceding the target).
  const CheckIn& penultimate() const { return checkins[checkins.size() - 2]; }
};

struct UserRecord {
  std::string external_id;
};

struct PoiRecord {
  std::string external_id;
  double lat = 0.0;
  double lon = 0.0;
  int category = -1;
};

struct Catalog {
  static constexpr int kTimeSlots = 48;

  std::vector<UserRecord> users;
  std::vector<PoiRecord> pois;
  std::vector<std::string> categories;

  int user_count() const { return static_cast<int>(users.size()); }
  int poi_count() const { return static_cast<int>(pois.size()); }
  const std::string& category_name(int id) const;
};

constexpr std::int64_t kSecondsPerDay = 86400;
constexpr std::int64_t kWindowSeconds = 24 * 3600;

inline std::int64_t local_seconds(const CheckIn& c) {
  return c.timestamp + 60LL * c.tz_offset_min;
}

// Day of week in the check-in's local time; 0=Sunday .. 6=Saturday.
int day_of_week_local(const CheckIn& c);

// Minutes past local midnight, in [0, 1440).
int minutes_of_day_local(const CheckIn& c);

// 30-minute slot index in [0, 48).
int time_slot_local(const CheckIn& c);

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(int year, int month, int day);

}  // namespace poirec
