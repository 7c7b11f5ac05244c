#include "cardframe/date.hpp"

#include <cstdio>

#include "cardframe/errors.hpp"

namespace cardframe {

int64_t days_from_civil(int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = unsigned(y - era * 400);                          // [0, 399]
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;   // [0, 365]
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;            // [0, 146096]
  return era * 146097 + int64_t(doe) - 719468;
}

CivilDate civil_from_days(int64_t z) {
  z += 719468;
  const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = unsigned(z - era * 146097);                 // [0, 146096]
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int64_t y = int64_t(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);    // [0, 365]
  const unsigned mp = (5 * doy + 2) / 153;                         // [0, 11]
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;                 // [1, 31]
  const unsigned m = mp + (mp < 10 ? 3 : -9);                      // [1, 12]
  return CivilDate{y + (m <= 2), m, d};
}

int64_t year_of(int64_t days) { return civil_from_days(days).year; }

std::optional<int64_t> try_parse_date(std::string_view s) {
  // [-]yyyy-mm-dd with exactly two-digit month/day fields.
  size_t i = 0;
  bool neg = false;
  if (!s.empty() && s[0] == '-') {
    neg = true;
    i = 1;
  }
  auto digits = [&](size_t from, size_t count) -> std::optional<int64_t> {
    if (from + count > s.size()) return std::nullopt;
    int64_t v = 0;
    for (size_t k = from; k < from + count; ++k) {
      if (s[k] < '0' || s[k] > '9') return std::nullopt;
      v = v * 10 + (s[k] - '0');
    }
    return v;
  };
  auto y = digits(i, 4);
  if (!y || i + 4 >= s.size() || s[i + 4] != '-') return std::nullopt;
  auto m = digits(i + 5, 2);
  if (!m || i + 7 >= s.size() || s[i + 7] != '-') return std::nullopt;
  auto d = digits(i + 8, 2);
  if (!d || i + 10 != s.size()) return std::nullopt;
  int64_t year = neg ? -*y : *y;
  if (*m < 1 || *m > 12 || *d < 1 || *d > 31) return std::nullopt;
  int64_t days = days_from_civil(year, unsigned(*m), unsigned(*d));
  CivilDate back = civil_from_days(days);  // rejects 2021-02-31 style inputs
  if (back.year != year || back.month != unsigned(*m) || back.day != unsigned(*d))
    return std::nullopt;
  return days;
}

int64_t parse_date(std::string_view ymd) {
  auto v = try_parse_date(ymd);
  if (!v) throw Error("malformed date: '" + std::string(ymd) + "'");
  return *v;
}

std::string format_date(int64_t days) {
  CivilDate c = civil_from_days(days);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u", (long long)c.year, c.month,
                c.day);
  return buf;
}

}  // namespace cardframe
