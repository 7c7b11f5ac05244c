#include "doctest.h"

#include "cardframe/date.hpp"
#include "cardframe/errors.hpp"

using namespace cardframe;

TEST_CASE("epoch anchors") {
  CHECK(days_from_civil(1970, 1, 1) == 0);
  CHECK(days_from_civil(1970, 1, 2) == 1);
  CHECK(days_from_civil(1969, 12, 31) == -1);
  // 1970..1991 spans 22 years with 5 leap years (72, 76, 80, 84, 88).
  CHECK(days_from_civil(1992, 1, 1) == 22 * 365 + 5);
}

TEST_CASE("civil round trip and calendar stepping") {
  int64_t prev = -1000;
  CivilDate prev_cd = civil_from_days(prev);
  for (int64_t d = -999; d <= 25000; ++d) {
    CivilDate cd = civil_from_days(d);
    CHECK(days_from_civil(cd.year, cd.month, cd.day) == d);
    REQUIRE(cd.month >= 1);
    REQUIRE(cd.month <= 12);
    REQUIRE(cd.day >= 1);
    REQUIRE(cd.day <= 31);
    // Stepping one day either increments the day or rolls a month/year.
    bool same_month = cd.year == prev_cd.year && cd.month == prev_cd.month;
    if (same_month)
      CHECK(cd.day == prev_cd.day + 1);
    else
      CHECK(cd.day == 1);
    prev_cd = cd;
  }
  (void)prev;
}

TEST_CASE("year extraction") {
  CHECK(year_of(days_from_civil(1998, 8, 2)) == 1998);
  CHECK(year_of(days_from_civil(1992, 12, 31)) == 1992);
  CHECK(year_of(days_from_civil(1993, 1, 1)) == 1993);
  CHECK(year_of(0) == 1970);
  CHECK(year_of(-1) == 1969);
}

TEST_CASE("parse accepts exactly yyyy-mm-dd with real dates") {
  CHECK(try_parse_date("1994-01-01") == days_from_civil(1994, 1, 1));
  CHECK(try_parse_date("1996-02-29") == days_from_civil(1996, 2, 29));  // leap
  CHECK(!try_parse_date("2021-02-31").has_value());
  CHECK(!try_parse_date("1994-02-29").has_value());  // not a leap year
  CHECK(!try_parse_date("1994-13-01").has_value());
  CHECK(!try_parse_date("1994-00-10").has_value());
  CHECK(!try_parse_date("1994-01-00").has_value());
  CHECK(!try_parse_date("1994/01/01").has_value());
  CHECK(!try_parse_date("94-01-01").has_value());
  CHECK(!try_parse_date("1994-1-01").has_value());
  CHECK(!try_parse_date("1994-01-1").has_value());
  CHECK(!try_parse_date("1994-01-01 ").has_value());
  CHECK(!try_parse_date("").has_value());
  CHECK_THROWS_AS(parse_date("not-a-date"), Error);
  CHECK(parse_date("1998-09-02") == days_from_civil(1998, 9, 2));
}

TEST_CASE("format/parse round trip") {
  for (int64_t d : {-365LL * 3, -1LL, 0LL, 1LL, 8035LL, 10000LL, 20000LL}) {
    std::string s = format_date(d);
    CHECK(s.size() == 10);
    CHECK(try_parse_date(s) == d);
  }
  CHECK(format_date(0) == "1970-01-01");
  CHECK(format_date(days_from_civil(1998, 8, 2)) == "1998-08-02");
}
