#include "doctest.h"

#include <string>
#include <vector>

#include "cardframe/oracle.hpp"
#include "support/testgen.hpp"
#include "test_util.hpp"

using namespace cardframe;

namespace {

PlainTable small_table() {
  PlainTable t;
  t.names = {"k", "v"};
  t.dtypes = {PlainDtype::I64, PlainDtype::F64};
  t.rows = {{int64_t(1), 1.5}, {int64_t(2), 2.5}, {int64_t(1), 3.5}};
  return t;
}

}  // namespace

TEST_CASE("naive inner join pairs rows by nested loops") {
  PlainTable l;
  l.names = {"k"};
  l.dtypes = {PlainDtype::I64};
  l.rows = {{int64_t(1)}, {int64_t(2)}, {int64_t(2)}};
  PlainTable r;
  r.names = {"k", "w"};
  r.dtypes = {PlainDtype::I64, PlainDtype::Str};
  r.rows = {{int64_t(2), std::string("two")}, {int64_t(3), std::string("three")}};

  PlainTable out = naive_inner_join(l, r, {{"k", "k"}});
  REQUIRE(out.n_rows() == 2);
  CHECK(out.names == std::vector<std::string>{"k", "w"});
  CHECK(std::get<int64_t>(out.rows[0][0]) == 2);
  CHECK(std::get<std::string>(out.rows[0][1]) == "two");
  CHECK(std::get<int64_t>(out.rows[1][0]) == 2);
}

TEST_CASE("naive groupby over one group reproduces a plain sum") {
  PlainTable t = small_table();
  PlainTable out = naive_groupby(t, {}, {{"v", AggFn::Sum, "total"}});
  REQUIRE(out.n_rows() == 1);
  CHECK(std::get<double>(out.rows[0][0]) == 1.5 + 2.5 + 3.5);
}

TEST_CASE("dp like matcher handles the fixed examples") {
  CHECK(plain_like_match("xabz", "%ab%"));
  CHECK(plain_like_match("", "%"));
  CHECK_FALSE(plain_like_match("", "_"));
  CHECK(plain_like_match("abc", "a_c"));
  CHECK_FALSE(plain_like_match("caf\xc3\xa9", "caf_"));
  CHECK(plain_like_match("caf\xc3\xa9", "caf__"));
  CHECK(plain_like_match("aaab", "%aab"));
  CHECK_FALSE(plain_like_match("aaab", "%aac"));
}

TEST_CASE("frames convert to plain tables and back without loss") {
  SplitMix rng(6060);
  for (int trial = 0; trial < 30; ++trial) {
    PlainTable t = testgen::random_table(rng);
    for (double threshold : {0.25, 0.9}) {
      Frame f = from_plain(t, threshold);
      PlainTable back = to_plain(f);
      std::string why;
      INFO("trial ", trial, " threshold ", threshold, ": ", why);
      CHECK(plain_equal(back, t, 0.0, &why));

      Frame again = from_plain(back, threshold);
      CHECK(testgen::frames_match(again, t, &why));
      // Same data, same threshold: the encoding decision is reproducible.
      for (size_t c = 0; c < f.n_cols(); ++c)
        CHECK(again.metas()[c].dtype == f.metas()[c].dtype);
    }
  }
}

TEST_CASE("plain_equal explains each kind of mismatch") {
  PlainTable a = small_table();
  std::string why;

  PlainTable names = a;
  names.names[1] = "w";
  CHECK_FALSE(plain_equal(a, names, 0.0, &why));
  CHECK(why.find("name") != std::string::npos);

  PlainTable dt = a;
  dt.dtypes[0] = PlainDtype::Date;
  CHECK_FALSE(plain_equal(a, dt, 0.0, &why));
  CHECK(why.find("dtype") != std::string::npos);

  PlainTable fewer = a;
  fewer.rows.pop_back();
  CHECK_FALSE(plain_equal(a, fewer, 0.0, &why));
  CHECK(why.find("row") != std::string::npos);

  PlainTable cell = a;
  cell.rows[2][0] = int64_t(9);
  CHECK_FALSE(plain_equal(a, cell, 0.0, &why));
  CHECK(why.find("row 2") != std::string::npos);

  CHECK(plain_equal(a, a, 0.0, &why));
}

TEST_CASE("relative tolerance applies to float cells only") {
  PlainTable a = small_table();
  PlainTable b = a;
  std::get<double>(b.rows[0][1]) *= 1.0 + 1e-12;
  CHECK_FALSE(plain_equal(a, b, 0.0, nullptr));
  CHECK(plain_equal(a, b, 1e-9, nullptr));
  CHECK_FALSE(plain_equal(a, b, 1e-15, nullptr));

  PlainTable c = a;
  c.rows[0][0] = int64_t(2);  // integer cells never get tolerance
  CHECK_FALSE(plain_equal(a, c, 1e-9, nullptr));
}

TEST_CASE("naive helpers validate their inputs") {
  PlainTable t = small_table();
  CHECK_THROWS_WITH_AS(naive_sort(t, {}), "sort_by needs at least one key",
                       Error);
  CHECK_THROWS_WITH_AS(naive_distinct(t, {}),
                       "distinct needs at least one key", Error);

  PlainTable other;
  other.names = {"k"};
  other.dtypes = {PlainDtype::I64};
  other.rows = {{int64_t(1)}};
  CHECK_THROWS_WITH_AS(naive_concat(t, other),
                       "concat requires identical schemas", Error);

  CHECK_THROWS_WITH_AS(naive_select(t, {"k", "k"}),
                       "duplicate column in selection: k", NameError);
  CHECK_THROWS_AS(naive_select(t, {"zzz"}), NameError);

  CHECK_THROWS_AS(t.col("zzz"), NameError);
  CHECK(t.col("v") == 1);
}

TEST_CASE("naive sort, distinct, and limit agree with hand results") {
  PlainTable t = small_table();
  PlainTable sorted = naive_sort(t, {{"k", false}, {"v", true}});
  CHECK(std::get<int64_t>(sorted.rows[0][0]) == 2);
  CHECK(std::get<double>(sorted.rows[1][1]) == 1.5);
  CHECK(std::get<double>(sorted.rows[2][1]) == 3.5);

  PlainTable uniq = naive_distinct(t, {"k"});
  REQUIRE(uniq.n_rows() == 2);
  CHECK(std::get<double>(uniq.rows[0][1]) == 1.5);  // first occurrence wins

  PlainTable top = naive_limit(sorted, 2);
  CHECK(top.n_rows() == 2);
  CHECK(naive_limit(sorted, 99).n_rows() == 3);
}
