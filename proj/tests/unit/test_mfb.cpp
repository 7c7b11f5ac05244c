#include "doctest.h"

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "cardframe/date.hpp"
#include "cardframe/mfb.hpp"
#include "cardframe/oracle.hpp"
#include "support/testgen.hpp"
#include "test_util.hpp"

using namespace cardframe;
using cardframe::testutil::TempDir;
using cardframe::testutil::i64_column;
using cardframe::testutil::str_column;

namespace {

Frame five_dtype_frame() {
  return FrameBuilder(3)
      .add_i64("i", {-1, 0, int64_t(1) << 60})
      .add_f64("x", {0.1, -0.0, 2.5})
      .add_date("d", {parse_date("1994-01-01"), 0, parse_date("1998-12-01")})
      .add_dict("c", {0, 1, 0}, Dictionary::from_values({"grün", "blau"}))
      .add_raw_string("s", std::vector<std::string>{"", "café", "b%a"})
      .build();
}

std::vector<char> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), std::streamsize(bytes.size()));
  REQUIRE(out.good());
}

uint64_t expected_header_bytes(const Frame& f) {
  uint64_t h = 4 + 4 + 8 + 4;
  for (const auto& name : f.names()) h += 2 + name.size() + 33;
  return h;
}

}  // namespace

TEST_CASE("round trip preserves every dtype bit for bit") {
  TempDir dir("mfb_rt");
  Frame f = five_dtype_frame();
  const std::string path = dir.file("all.mfb");
  write_mfb(f, path);
  ReadResult r = read_mfb(path);
  std::string why;
  INFO(why);
  CHECK(testgen::frames_match(r.frame, to_plain(f), &why));
  CHECK(r.frame.metas()[3].dtype == LogicalDtype::DictCode);
  CHECK(r.frame.metas()[4].dtype == LogicalDtype::RawString);
  CHECK(r.stats.header_bytes == expected_header_bytes(f));
}

TEST_CASE("an empty frame with columns survives the trip") {
  TempDir dir("mfb_empty");
  Frame f = FrameBuilder(0).add_i64("a", {}).add_raw_string("b", {}).build();
  const std::string path = dir.file("empty.mfb");
  write_mfb(f, path);
  ReadResult r = read_mfb(path);
  CHECK(r.frame.n_rows() == 0);
  CHECK(r.frame.names() == std::vector<std::string>{"a", "b"});
  CHECK(r.frame.metas()[1].dtype == LogicalDtype::RawString);
}

TEST_CASE("random frames round trip exactly") {
  TempDir dir("mfb_rand");
  SplitMix rng(4242);
  const double thresholds[] = {0.25, 0.5, 0.9};
  for (int trial = 0; trial < 50; ++trial) {
    PlainTable t = testgen::random_table(rng);
    Frame f = testgen::engine_frame(t, thresholds[rng.below(3)]);
    const std::string path = dir.file("t" + std::to_string(trial) + ".mfb");
    write_mfb(f, path);
    ReadResult r = read_mfb(path);
    std::string why;
    INFO("trial ", trial, ": ", why);
    CHECK(testgen::frames_match(r.frame, t, &why));
    // The write fixes the encoding; the reader reproduces it.
    for (size_t c = 0; c < f.n_cols(); ++c)
      CHECK(r.frame.metas()[c].dtype == f.metas()[c].dtype);
  }
}

TEST_CASE("projection reads only the requested byte ranges, in given order") {
  TempDir dir("mfb_proj");
  Frame f = five_dtype_frame();
  const std::string path = dir.file("proj.mfb");
  write_mfb(f, path);

  MfbDirectory d = read_mfb_directory(path);
  uint64_t want_payload = 0;
  for (const auto& c : d.columns)
    if (c.name == "s" || c.name == "i") want_payload += c.data_len + c.aux_len;

  ReadResult r = read_mfb(path, {"s", "i"});
  CHECK(r.frame.names() == std::vector<std::string>{"s", "i"});
  CHECK(str_column(r.frame, "s") ==
        std::vector<std::string>{"", "café", "b%a"});
  CHECK(i64_column(r.frame, "i") ==
        std::vector<int64_t>{-1, 0, int64_t(1) << 60});
  CHECK(r.stats.payload_bytes == want_payload);
  CHECK(r.stats.header_bytes == expected_header_bytes(f));

  // Directory-only access costs zero payload bytes.
  IoStats ds;
  read_mfb_directory(path, &ds);
  CHECK(ds.payload_bytes == 0);
  CHECK(ds.header_bytes == expected_header_bytes(f));
}

TEST_CASE("payload cost scales with the number of requested columns") {
  TempDir dir("mfb_cost");
  FrameBuilder b(100);
  std::vector<int64_t> v(100);
  for (int i = 0; i < 100; ++i) v[size_t(i)] = i;
  for (const char* name : {"c0", "c1", "c2", "c3", "c4"}) b.add_i64(name, v);
  Frame f = b.build();
  const std::string path = dir.file("cost.mfb");
  write_mfb(f, path);

  ReadResult all = read_mfb(path);
  ReadResult three = read_mfb(path, {"c0", "c2", "c4"});
  CHECK(all.stats.payload_bytes == 5 * 100 * 8);
  CHECK(three.stats.payload_bytes == 3 * 100 * 8);
}

TEST_CASE("asking for a column the file lacks is a name error") {
  TempDir dir("mfb_name");
  const std::string path = dir.file("n.mfb");
  write_mfb(five_dtype_frame(), path);
  CHECK_THROWS_WITH_AS(read_mfb(path, {"i", "nope"}), "unknown column: nope",
                       NameError);
}

TEST_CASE("corrupted headers are rejected with specific reasons") {
  TempDir dir("mfb_bad");
  Frame f = five_dtype_frame();
  const std::string good = dir.file("good.mfb");
  write_mfb(f, good);
  std::vector<char> bytes = slurp(good);

  SUBCASE("flipped magic") {
    auto b = bytes;
    b[0] = 'X';
    const std::string p = dir.file("magic.mfb");
    spit(p, b);
    CHECK_THROWS_WITH_AS(read_mfb(p), ("bad magic: " + p).c_str(),
                         FormatError);
  }
  SUBCASE("future version") {
    auto b = bytes;
    b[4] = 9;  // version u32 little-endian low byte
    const std::string p = dir.file("ver.mfb");
    spit(p, b);
    CHECK_THROWS_WITH_AS(read_mfb(p), ("unsupported version 9: " + p).c_str(),
                         FormatError);
  }
  SUBCASE("truncated mid-header") {
    std::vector<char> b(bytes.begin(), bytes.begin() + 10);
    const std::string p = dir.file("trunc.mfb");
    spit(p, b);
    CHECK_THROWS_WITH_AS(read_mfb(p), ("truncated file: " + p).c_str(),
                         FormatError);
  }
  SUBCASE("truncated payload") {
    std::vector<char> b(bytes.begin(), bytes.end() - 8);
    const std::string p = dir.file("short.mfb");
    spit(p, b);
    CHECK_THROWS_WITH_AS(read_mfb(p), ("payload past end of file: " + p).c_str(),
                         FormatError);
  }
  SUBCASE("directory points past the end") {
    // First directory entry: name "i" at offset 20; data_offset lives at
    // 20 + 2 + 1 + 1 = 24.
    auto b = bytes;
    const size_t off = 24;
    uint64_t huge = uint64_t(bytes.size()) + 1000;
    for (int i = 0; i < 8; ++i) b[off + size_t(i)] = char((huge >> (8 * i)) & 0xff);
    const std::string p = dir.file("past.mfb");
    spit(p, b);
    CHECK_THROWS_WITH_AS(read_mfb(p), ("payload past end of file: " + p).c_str(),
                         FormatError);
  }
}

TEST_CASE("a dictionary with a repeated value is rejected") {
  TempDir dir("mfb_dup");
  // Two 2-byte values "aa" and "bb"; patching the second to "aa" makes the
  // dictionary ambiguous.
  Frame f = FrameBuilder(2)
                .add_dict("c", {0, 1}, Dictionary::from_values({"aa", "bb"}))
                .build();
  const std::string good = dir.file("dict.mfb");
  write_mfb(f, good);
  MfbDirectory d = read_mfb_directory(good);
  REQUIRE(d.columns.size() == 1);
  const auto& c = d.columns[0];
  REQUIRE(c.aux_len == 8 + 3 * 8 + 4);  // count, offsets [0,2,4], "aabb"

  std::vector<char> bytes = slurp(good);
  size_t value_bytes_at = size_t(c.aux_offset) + 8 + 3 * 8;
  bytes[value_bytes_at + 2] = 'a';
  bytes[value_bytes_at + 3] = 'a';
  const std::string p = dir.file("dup.mfb");
  spit(p, bytes);
  CHECK_THROWS_WITH_AS(read_mfb(p), "duplicate dictionary value in column c",
                       FormatError);
}

TEST_CASE("out-of-range dictionary codes in the data region are rejected") {
  TempDir dir("mfb_code");
  Frame f = FrameBuilder(2)
                .add_dict("c", {0, 1}, Dictionary::from_values({"aa", "bb"}))
                .build();
  const std::string good = dir.file("dict.mfb");
  write_mfb(f, good);
  MfbDirectory d = read_mfb_directory(good);
  std::vector<char> bytes = slurp(good);
  // Second code cell: data_offset + 8. Patch it to 7 (dictionary holds 2).
  size_t at = size_t(d.columns[0].data_offset) + 8;
  bytes[at] = 7;
  const std::string p = dir.file("badcode.mfb");
  spit(p, bytes);
  CHECK_THROWS_AS(read_mfb(p), FormatError);
  try {
    read_mfb(p);
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("invalid column data: ") == 0);
  }
}
