#include "linkreg/timestamp.hpp"

#include <charconv>
#include <cstdio>

namespace linkreg {

namespace {

bool parse_uint(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
  }
  auto res = std::from_chars(text.data() + pos, text.data() + pos + len, out);
  return res.ec == std::errc{};
}

bool parse_clock(std::string_view text, int& hour, int& minute) {
  // HH:MM or HH:MM:SS with zero seconds
  if (text.size() != 5 && text.size() != 8) return false;
  if (text[2] != ':') return false;
  if (!parse_uint(text, 0, 2, hour) || !parse_uint(text, 3, 2, minute)) return false;
  if (text.size() == 8) {
    int second = 0;
    if (text[5] != ':' || !parse_uint(text, 6, 2, second) || second != 0) return false;
  }
  return hour >= 0 && hour < 24 && minute >= 0 && minute < 60;
}

}  // namespace

Timestamp Timestamp::from_civil(int year, unsigned month, unsigned day, int hour, int minute) {
  using namespace std::chrono;
  local_days d{std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}};
  return Timestamp(local_time<minutes>(d) + hours(hour) + minutes(minute));
}

std::optional<Timestamp> Timestamp::parse_iso(std::string_view text) {
  if (text.size() < 16) return std::nullopt;
  int year = 0, month = 0, day = 0, hour = 0, minute = 0;
  if (!parse_uint(text, 0, 4, year) || text[4] != '-' || !parse_uint(text, 5, 2, month) || text[7] != '-' ||
      !parse_uint(text, 8, 2, day)) {
    return std::nullopt;
  }
  if (text[10] != 'T' && text[10] != ' ') return std::nullopt;
  if (!parse_clock(text.substr(11), hour, minute)) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                                  std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) return std::nullopt;
  return from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day), hour, minute);
}

std::optional<Timestamp> Timestamp::parse_flexible(std::string_view text) {
  int hour = 0, minute = 0;
  if (parse_clock(text, hour, minute)) {
    return reference_date() + std::chrono::minutes(hour * 60 + minute);
  }
  return parse_iso(text);
}

Timestamp Timestamp::reference_date() { return from_civil(2000, 1, 1); }

int Timestamp::minute_of_day() const {
  using namespace std::chrono;
  auto since_midnight = instant_ - floor<days>(instant_);
  return static_cast<int>(since_midnight.count());
}

int Timestamp::hour() const { return minute_of_day() / 60; }

int Timestamp::minute() const { return minute_of_day() % 60; }

std::string Timestamp::to_string() const {
  using namespace std::chrono;
  auto day_start = floor<days>(instant_);
  year_month_day ymd{day_start};
  int mod = minute_of_day();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), mod / 60, mod % 60);
  return buf;
}

}  // namespace linkreg
