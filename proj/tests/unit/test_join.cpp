#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "cardframe/date.hpp"
#include "cardframe/join.hpp"
#include "cardframe/oracle.hpp"
#include "support/testgen.hpp"
#include "test_util.hpp"

using namespace cardframe;
using cardframe::testutil::f64_column;
using cardframe::testutil::i64_column;
using cardframe::testutil::str_column;

namespace {

const JoinKeys kK = {{"k", "k"}};

std::vector<JoinOptions> option_grid() {
  std::vector<JoinOptions> out;
  for (auto algo : {JoinAlgo::Hash, JoinAlgo::SortMerge})
    for (auto build : {BuildSide::Auto, BuildSide::Left, BuildSide::Right}) {
      JoinOptions o;
      o.algo = algo;
      o.build = build;
      out.push_back(o);
    }
  return out;
}

}  // namespace

TEST_CASE("inner join index pairs rows left-major") {
  Frame l = FrameBuilder(3).add_i64("k", {1, 2, 2}).build();
  Frame r = FrameBuilder(2).add_i64("k", {2, 3}).build();
  for (const auto& opt : option_grid()) {
    INFO("algo ", opt.algo == JoinAlgo::Hash ? "hash" : "sortmerge",
         " build ", int(opt.build));
    JoinIndex idx = inner_join_index(l, r, kK, opt);
    CHECK(idx.left_rows == std::vector<RowId>{1, 2});
    CHECK(idx.right_rows == std::vector<RowId>{0, 0});
  }
}

TEST_CASE("joining against an empty right keeps the merged schema") {
  Frame l = FrameBuilder(2).add_i64("k", {1, 2}).add_f64("x", {0.5, 1.5}).build();
  Frame r = FrameBuilder(0).add_i64("k", {}).add_i64("payload", {}).build();
  Frame out = inner_join(l, r, kK);
  CHECK(out.n_rows() == 0);
  CHECK(out.names() == std::vector<std::string>{"k", "x", "payload"});
}

TEST_CASE("lookup against a unique right side keeps every left row") {
  Frame l = FrameBuilder(5)
                .add_i64("k", {3, 1, 2, 3, 1})
                .add_i64("v", {10, 20, 30, 40, 50})
                .build();
  Frame r = FrameBuilder(3)
                .add_i64("k", {1, 2, 3})
                .add_raw_string("name", {"one", "two", "three"})
                .build();
  Frame out = inner_join(l, r, kK);
  CHECK(out.n_rows() == 5);
  CHECK(i64_column(out, "k") == i64_column(l, "k"));
  CHECK(i64_column(out, "v") == i64_column(l, "v"));
  CHECK(str_column(out, "name") ==
        std::vector<std::string>{"three", "one", "two", "three", "one"});
}

TEST_CASE("semi and anti joins partition the left rows") {
  Frame l = FrameBuilder(3).add_i64("k", {1, 2, 3}).build();
  Frame r = FrameBuilder(1).add_i64("k", {2}).build();
  Frame semi = semi_join(l, r, kK);
  CHECK(i64_column(semi, "k") == std::vector<int64_t>{2});
  Frame anti = anti_join(l, r, kK);
  CHECK(i64_column(anti, "k") == std::vector<int64_t>{1, 3});

  // Against an empty right: semi drops all, anti keeps all.
  Frame empty = FrameBuilder(0).add_i64("k", {}).build();
  CHECK(semi_join(l, empty, kK).n_rows() == 0);
  CHECK(i64_column(anti_join(l, empty, kK), "k") ==
        std::vector<int64_t>{1, 2, 3});

  // Semi is idempotent, and duplicates on the right never duplicate output.
  Frame dup = FrameBuilder(3).add_i64("k", {2, 2, 2}).build();
  Frame once = semi_join(l, dup, kK);
  CHECK(i64_column(once, "k") == std::vector<int64_t>{2});
  Frame twice = semi_join(once, dup, kK);
  CHECK(i64_column(twice, "k") == std::vector<int64_t>{2});
}

TEST_CASE("colliding right names gain a _right suffix; right keys vanish") {
  Frame l = FrameBuilder(1)
                .add_i64("id", {1})
                .add_raw_string("name", {"left"})
                .build();
  Frame r = FrameBuilder(1)
                .add_i64("key", {1})
                .add_raw_string("name", {"right"})
                .add_f64("extra", {2.5})
                .build();
  Frame out = inner_join(l, r, {{"id", "key"}});
  CHECK(out.names() ==
        std::vector<std::string>{"id", "name", "name_right", "extra"});
  CHECK(str_column(out, "name") == std::vector<std::string>{"left"});
  CHECK(str_column(out, "name_right") == std::vector<std::string>{"right"});
  CHECK(f64_column(out, "extra") == std::vector<double>{2.5});
}

TEST_CASE("composite integer+string keys match tuple-wise") {
  Frame l = FrameBuilder(4)
                .add_i64("a", {1, 1, 2, 2})
                .add_raw_string("b", {"x", "y", "x", "y"})
                .add_i64("row", {0, 1, 2, 3})
                .build();
  Frame r = FrameBuilder(2)
                .add_i64("a", {1, 2})
                .add_raw_string("b", {"y", "x"})
                .add_i64("tag", {10, 20})
                .build();
  JoinKeys keys = {{"a", "a"}, {"b", "b"}};
  Frame out = inner_join(l, r, keys);
  CHECK(i64_column(out, "row") == std::vector<int64_t>{1, 2});
  CHECK(i64_column(out, "tag") == std::vector<int64_t>{10, 20});

  PlainTable want = naive_inner_join(to_plain(l), to_plain(r), keys);
  std::string why;
  INFO(why);
  CHECK(testgen::frames_match(out, want, &why));
}

TEST_CASE("float keys: NaN matches NaN, signed zeros do not match") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Frame l = FrameBuilder(3)
                .add_f64("k", {nan, 0.0, 1.0})
                .add_i64("lrow", {0, 1, 2})
                .build();
  Frame r = FrameBuilder(3)
                .add_f64("k", {nan, -0.0, 1.0})
                .add_i64("rrow", {0, 1, 2})
                .build();
  for (const auto& opt : option_grid()) {
    INFO("algo ", int(opt.algo), " build ", int(opt.build));
    Frame out = inner_join(l, r, kK, opt);
    CHECK(i64_column(out, "lrow") == std::vector<int64_t>{0, 2});
    CHECK(i64_column(out, "rrow") == std::vector<int64_t>{0, 2});
  }
  PlainTable want = naive_inner_join(to_plain(l), to_plain(r), kK);
  CHECK(want.n_rows() == 2);
  CHECK(std::get<int64_t>(want.rows[0][want.col("lrow")]) == 0);
  CHECK(std::get<int64_t>(want.rows[1][want.col("rrow")]) == 2);
}

TEST_CASE("date and plain integer keys may be paired") {
  int64_t d = parse_date("1995-06-17");
  Frame l = FrameBuilder(2).add_date("k", {d, d + 1}).build();
  Frame r = FrameBuilder(1).add_i64("k", {d}).build();
  JoinIndex idx = inner_join_index(l, r, kK);
  CHECK(idx.left_rows == std::vector<RowId>{0});
}

TEST_CASE("incompatible key dtypes raise a join error in both engines") {
  Frame l = FrameBuilder(1).add_i64("k", {1}).build();
  Frame rf = FrameBuilder(1).add_f64("k", {1.0}).build();
  Frame rs = FrameBuilder(1).add_raw_string("k", {"1"}).build();
  CHECK_THROWS_AS(inner_join(l, rf, kK), JoinError);
  CHECK_THROWS_AS(inner_join(l, rs, kK), JoinError);
  CHECK_THROWS_AS(inner_join(rf, rs, kK), JoinError);
  CHECK_THROWS_AS(naive_inner_join(to_plain(l), to_plain(rf), kK), JoinError);
  CHECK_THROWS_AS(naive_inner_join(to_plain(l), to_plain(rs), kK), JoinError);
  CHECK_THROWS_AS(naive_inner_join(to_plain(rf), to_plain(rs), kK), JoinError);

  CHECK_THROWS_WITH_AS(inner_join(l, rf, {}),
                       "join needs at least one key pair", JoinError);
  CHECK_THROWS_WITH_AS(naive_inner_join(to_plain(l), to_plain(rf), {}),
                       "join needs at least one key pair", JoinError);
}

TEST_CASE("dictionary and pool string keys join interchangeably") {
  std::vector<std::string> many;
  for (int i = 0; i < 40; ++i) many.push_back(i % 2 ? "ab" : "cd");
  PlainTable lt;
  lt.names = {"k", "v"};
  lt.dtypes = {PlainDtype::Str, PlainDtype::I64};
  for (size_t i = 0; i < many.size(); ++i)
    lt.rows.push_back({many[i], int64_t(i)});
  PlainTable rt;
  rt.names = {"k", "w"};
  rt.dtypes = {PlainDtype::Str, PlainDtype::I64};
  rt.rows.push_back({std::string("ab"), int64_t(100)});
  rt.rows.push_back({std::string("zz"), int64_t(200)});

  Frame l_dict = testgen::engine_frame(lt, 0.9);
  Frame r_pool = testgen::engine_frame(rt, 0.1);
  REQUIRE(l_dict.metas()[0].dtype == LogicalDtype::DictCode);
  REQUIRE(r_pool.metas()[0].dtype == LogicalDtype::RawString);

  Frame out = inner_join(l_dict, r_pool, kK);
  PlainTable want = naive_inner_join(lt, rt, kK);
  std::string why;
  INFO(why);
  CHECK(testgen::frames_match(out, want, &why));
  CHECK(out.n_rows() == 20);
}

TEST_CASE("duplicate-heavy keys produce the full cartesian block in order") {
  Frame l = FrameBuilder(4)
                .add_i64("k", {5, 5, 6, 5})
                .add_i64("lrow", {0, 1, 2, 3})
                .build();
  Frame r = FrameBuilder(3)
                .add_i64("k", {5, 5, 7})
                .add_i64("rrow", {0, 1, 2})
                .build();
  PlainTable want = naive_inner_join(to_plain(l), to_plain(r), kK);
  for (const auto& opt : option_grid()) {
    INFO("algo ", int(opt.algo), " build ", int(opt.build));
    Frame out = inner_join(l, r, kK, opt);
    std::string why;
    INFO(why);
    CHECK(testgen::frames_match(out, want, &why));
    CHECK(i64_column(out, "lrow") == std::vector<int64_t>{0, 0, 1, 1, 3, 3});
    CHECK(i64_column(out, "rrow") == std::vector<int64_t>{0, 1, 0, 1, 0, 1});
  }
}
