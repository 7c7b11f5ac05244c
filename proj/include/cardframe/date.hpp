#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cardframe {

// Dates are days since 1970-01-01 in the proleptic Gregorian calendar, signed.

struct CivilDate {
  int64_t year;
  unsigned month;  // 1..12
  unsigned day;    // 1..31
};

int64_t days_from_civil(int64_t year, unsigned month, unsigned day);
CivilDate civil_from_days(int64_t days);
int64_t year_of(int64_t days);

// "yyyy-mm-dd"; rejects nonexistent dates (2021-02-31).
std::optional<int64_t> try_parse_date(std::string_view ymd);
int64_t parse_date(std::string_view ymd);  // Error on malformed input
std::string format_date(int64_t days);

}  // namespace cardframe
