#pragma once

#include <string>
#include <vector>

#include "poirec/types.hpp"

namespace poirec {

enum class CheckinFormat { foursquare, gowalla };

CheckinFormat parse_format(const std::string& name);
std::string format_name(CheckinFormat f);

struct ParseOptions {
  CheckinFormat format = CheckinFormat::foursquare;
  // Applied when a line carries no timezone offset (gowalla).
  int default_tz_offset_min = 0;
  // Optional frequency filters; 0 disables.
  int min_user_checkins = 0;
  int min_poi_checkins = 0;
};

struct ParseResult {
  Catalog catalog;
  // checkins[u] sorted ascending by timestamp.
  std::vector<std::vector<CheckIn>> checkins_by_user;

  std::size_t total_checkins() const;
};

// Reads a raw check-in log. Catalog indices are assigned in first
// appearance order of the (filtered) stream. Malformed lines raise
// DataError carrying the line number.
ParseResult parse_checkins(const std::string& path, const ParseOptions& opts);

// Partitions one user's sorted check-ins into consecutive 24-hour windows,
// each anchored at the first check-in after the previous window closes.
// Windows with fewer than 2 check-ins are dropped.
std::vector<Trajectory> segment_user(const std::vector<CheckIn>& sorted);

// All users; output ordered by (user, window_start).
std::vector<Trajectory> segment_trajectories(
    const std::vector<std::vector<CheckIn>>& checkins_by_user);

struct SplitResult {
  // Per trajectory (parallel to the input list): true = train.
  std::vector<bool> is_train;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
};

// Per user, the earliest ceil(ratio*n) trajectories go to train.
SplitResult chronological_split(const std::vector<Trajectory>& trajectories,
                                int user_count, double ratio = 0.8);

void save_catalog(const Catalog& catalog, const std::string& path);
Catalog load_catalog(const std::string& path);

}  // namespace poirec
