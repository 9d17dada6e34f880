#include "poirec/types.hpp"

namespace poirec {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

const std::string& Catalog::category_name(int id) const {
  static const std::string kNone = "";
  if (id < 0 || id >= static_cast<int>(categories.size())) return kNone;
  return categories[id];
}

int day_of_week_local(const CheckIn& c) {
  std::int64_t days = floor_div(local_seconds(c), kSecondsPerDay);
  // 1970-01-01 was a Thursday.
  return static_cast<int>(((days + 4) % 7 + 7) % 7);
}

int minutes_of_day_local(const CheckIn& c) {
  std::int64_t s = local_seconds(c);
  std::int64_t sod = s - floor_div(s, kSecondsPerDay) * kSecondsPerDay;
  return static_cast<int>(sod / 60);
}

int time_slot_local(const CheckIn& c) { return minutes_of_day_local(c) / 30; }

std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

}  // namespace poirec
