#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace linkreg {

/// Naive local date-time at minute resolution. No time zone or DST handling:
/// the dataset's clock is taken at face value.
class Timestamp {
 public:
  using Minutes = std::chrono::local_time<std::chrono::minutes>;

  constexpr Timestamp() = default;
  constexpr explicit Timestamp(Minutes instant) : instant_(instant) {}

  static Timestamp from_civil(int year, unsigned month, unsigned day, int hour = 0, int minute = 0);

  /// Parses `YYYY-MM-DDTHH:MM[:SS]` (a space may replace `T`). Seconds must
  /// be zero. Returns nullopt on malformed input.
  static std::optional<Timestamp> parse_iso(std::string_view text);

  /// Accepts ISO-8601 or a bare `HH:MM`, which is placed on `reference_date()`.
  static std::optional<Timestamp> parse_flexible(std::string_view text);

  /// Date used for clock-only inputs.
  static Timestamp reference_date();

  Minutes instant() const { return instant_; }
  std::int64_t minutes_since_epoch() const { return instant_.time_since_epoch().count(); }
  int hour() const;
  int minute() const;
  int minute_of_day() const;

  Timestamp operator+(std::chrono::minutes d) const { return Timestamp(instant_ + d); }
  Timestamp operator-(std::chrono::minutes d) const { return Timestamp(instant_ - d); }
  std::chrono::minutes operator-(const Timestamp& o) const { return instant_ - o.instant_; }

  /// `YYYY-MM-DDTHH:MM`
  std::string to_string() const;

  friend constexpr auto operator<=>(const Timestamp&, const Timestamp&) = default;

 private:
  Minutes instant_{};
};

}  // namespace linkreg
