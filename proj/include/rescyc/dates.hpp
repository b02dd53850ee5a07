#ifndef RESCYC_DATES_HPP
#define RESCYC_DATES_HPP

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace rescyc {

/// Calendar day stored as days since 1970-01-01 (proleptic Gregorian).
class Date {
public:
  Date() = default;
  explicit Date(std::int64_t days_since_epoch) : days_(days_since_epoch) {}

  static Date from_ymd(int year, unsigned month, unsigned day) {
    return Date(days_from_civil(year, month, day));
  }

  /// Strict ISO-8601 "YYYY-MM-DD"; rejects impossible dates.
  static std::optional<Date> parse_iso(std::string_view text);

  std::int64_t days_since_epoch() const { return days_; }
  std::int64_t epoch_seconds() const { return days_ * 86400; }

  std::string to_iso() const;

  friend auto operator<=>(const Date&, const Date&) = default;

private:
  // Howard Hinnant's civil-calendar conversion.
  static std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
  }

  static void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yy + (m <= 2));
  }

  std::int64_t days_ = 0;
};

inline std::optional<Date> Date::parse_iso(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;
  const int y = (text[0] - '0') * 1000 + (text[1] - '0') * 100 +
                (text[2] - '0') * 10 + (text[3] - '0');
  const unsigned m = static_cast<unsigned>((text[5] - '0') * 10 + (text[6] - '0'));
  const unsigned d = static_cast<unsigned>((text[8] - '0') * 10 + (text[9] - '0'));
  if (m < 1 || m > 12 || d < 1) return std::nullopt;
  static constexpr unsigned mdays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  const unsigned dmax = (m == 2 && leap) ? 29 : mdays[m - 1];
  if (d > dmax) return std::nullopt;
  return from_ymd(y, m, d);
}

inline std::string Date::to_iso() const {
  int y;
  unsigned m, d;
  civil_from_days(days_, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
  return buf;
}

} // namespace rescyc

#endif // RESCYC_DATES_HPP
