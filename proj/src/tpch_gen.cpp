#include "cardframe/tpch_gen.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "cardframe/csv.hpp"
#include "cardframe/date.hpp"
#include "cardframe/encoding.hpp"
#include "cardframe/frame.hpp"
#include "cardframe/hash.hpp"
#include "cardframe/mfb.hpp"

namespace cardframe {

namespace {

// All money values are whole cents; CSV text is printed from the integer and
// the in-memory Float64 is cents/100.0. Both directions round to the same
// nearest double, so generated MFB files and CSV-converted MFB files agree
// byte for byte.
std::string money(int64_t cents) {
  bool neg = cents < 0;
  uint64_t a = neg ? uint64_t(-cents) : uint64_t(cents);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%" PRIu64 ".%02" PRIu64, neg ? "-" : "",
                a / 100, a % 100);
  return buf;
}

double money_f64(int64_t cents) { return double(cents) / 100.0; }

const char* const kRegionNames[5] = {"AFRICA", "AMERICA", "ASIA", "EUROPE",
                                     "MIDDLE EAST"};

struct NationDef {
  const char* name;
  int64_t region;
};
const NationDef kNations[25] = {
    {"ALGERIA", 0},      {"ARGENTINA", 1}, {"BRAZIL", 1},
    {"CANADA", 1},       {"EGYPT", 4},     {"ETHIOPIA", 0},
    {"FRANCE", 3},       {"GERMANY", 3},   {"INDIA", 2},
    {"INDONESIA", 2},    {"IRAN", 4},      {"IRAQ", 4},
    {"JAPAN", 2},        {"JORDAN", 4},    {"KENYA", 0},
    {"MOROCCO", 0},      {"MOZAMBIQUE", 0},{"PERU", 1},
    {"CHINA", 2},        {"ROMANIA", 3},   {"SAUDI ARABIA", 4},
    {"VIETNAM", 2},      {"RUSSIA", 3},    {"UNITED KINGDOM", 3},
    {"UNITED STATES", 1}};

const char* const kSegments[5] = {"AUTOMOBILE", "BUILDING", "FURNITURE",
                                  "MACHINERY", "HOUSEHOLD"};
const char* const kPriorities[5] = {"1-URGENT", "2-HIGH", "3-MEDIUM",
                                    "4-NOT SPECIFIED", "5-LOW"};
const char* const kOrderStatus[3] = {"O", "F", "P"};

// Base vocabulary for comment-like text. "special" and "requests" are kept
// out of it so the '%special%requests%' match rate is set purely by the
// injection probability below.
const char* const kWords[] = {
    "carefully", "quickly",  "furiously", "slyly",     "blithely", "ironic",
    "final",     "pending",  "express",   "regular",   "bold",     "even",
    "silent",    "unusual",  "daring",    "deposits",  "accounts", "packages",
    "ideas",     "pinto",    "beans",     "foxes",     "dolphins", "theodolites",
    "platelets", "escapades", "instructions", "excuses", "asymptotes", "courts",
    "dugouts",   "warhorses", "sheaves",  "sauternes", "waters",   "against",
    "above",     "across",   "sleep",     "haggle",    "nag",      "cajole",
    "boost",     "detect",   "wake",      "engage",    "promise",  "dazzle"};
constexpr size_t kNumWords = sizeof(kWords) / sizeof(kWords[0]);

const char* const kPartWords[] = {
    "almond",    "antique",  "aquamarine", "azure",   "beige",   "bisque",
    "black",     "blanched", "blue",       "blush",   "brown",   "burlywood",
    "chartreuse","chocolate","coral",      "cream",   "cyan",    "dark",
    "deep",      "dim",      "drab",       "firebrick", "forest", "frosted",
    "gainsboro", "goldenrod","green",      "honeydew", "hot",    "indian",
    "ivory",     "khaki",    "lace",       "lavender", "lemon",  "light",
    "linen",     "magenta",  "maroon",     "medium",  "metallic", "midnight",
    "mint",      "misty",    "moccasin",   "navajo",  "navy",    "olive",
    "orange",    "orchid"};
constexpr size_t kNumPartWords = sizeof(kPartWords) / sizeof(kPartWords[0]);

const char* const kTypeA[6] = {"STANDARD", "SMALL", "MEDIUM",
                               "LARGE",    "ECONOMY", "PROMO"};
const char* const kTypeB[5] = {"ANODIZED", "BURNISHED", "PLATED", "POLISHED",
                               "BRUSHED"};
const char* const kTypeC[5] = {"TIN", "NICKEL", "BRASS", "STEEL", "COPPER"};

constexpr double kSpecialRequestsRate = 0.08;

std::string make_comment(SplitMix& r) {
  size_t n = 5 + r.below(5);
  std::string out;
  for (size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += kWords[r.below(kNumWords)];
  }
  return out;
}

// Comment with a seeded chance of containing "special" ... "requests" in
// order, which is exactly what the pattern '%special%requests%' detects.
std::string make_order_comment(SplitMix& r) {
  std::vector<std::string_view> w;
  size_t n = 5 + r.below(5);
  w.reserve(n + 2);
  for (size_t i = 0; i < n; ++i) w.push_back(kWords[r.below(kNumWords)]);
  if (r.chance(kSpecialRequestsRate)) {
    size_t i = r.below(w.size() + 1);
    w.insert(w.begin() + i, "special");
    size_t j = i + 1 + r.below(w.size() - i);
    w.insert(w.begin() + j, "requests");
  }
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += w[i];
  }
  return out;
}

std::string pad_key_name(const char* prefix, uint64_t key) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s#%09" PRIu64, prefix, key);
  return buf;
}

uint64_t digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  Digest64 d;
  d.add_bytes(buf.str());
  return d.h;
}

// One generated table on its way to disk: CSV text, schema, and the typed
// frame are built together so all three outputs come from the same values.
struct TableSink {
  std::string name;
  std::filesystem::path dir;
  CsvSchema schema;
  std::string csv;

  TableSink(std::string n, const std::filesystem::path& d,
            std::vector<CsvColumnSpec> cols)
      : name(std::move(n)), dir(d) {
    schema.columns = std::move(cols);
  }

  void row(const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
      if (i) csv += '|';
      csv += fields[i];
    }
    csv += '\n';
  }

  GenTable finish(const Frame& f) {
    GenTable t;
    t.name = name;
    t.rows = f.n_rows();
    t.csv_path = (dir / (name + ".csv")).string();
    t.schema_path = (dir / (name + ".schema.json")).string();
    t.mfb_path = (dir / (name + ".mfb")).string();
    {
      std::ofstream out(t.csv_path, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot open for writing: " + t.csv_path);
      out << csv;
      if (!out) throw Error("write failed: " + t.csv_path);
    }
    save_schema(schema, t.schema_path);
    write_mfb(f, t.mfb_path);
    t.csv_hash = digest_file(t.csv_path);
    t.mfb_hash = digest_file(t.mfb_path);
    return t;
  }
};

SplitMix table_rng(uint64_t seed, uint64_t ordinal) {
  return SplitMix(mix64(seed + kGolden * (ordinal + 1)));
}

uint64_t scaled(double scale, uint64_t base) {
  double v = scale * double(base);
  uint64_t n = uint64_t(v + 0.5);
  return n == 0 ? 1 : n;
}

}  // namespace

GenManifest gen_tpch_mini(double scale, uint64_t seed,
                          const std::string& out_dir) {
  if (!(scale > 0)) throw Error("scale must be positive");
  std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  GenManifest manifest;
  manifest.scale = scale;
  manifest.seed = seed;

  const uint64_t n_supp = scaled(scale, 10000);
  const uint64_t n_cust = scaled(scale, 150000);
  const uint64_t n_part = scaled(scale, 200000);
  const uint64_t n_orders = scaled(scale, 1500000);
  const uint64_t lines_per_part = std::min<uint64_t>(4, n_supp);

  const int64_t kOrderEpoch = days_from_civil(1992, 1, 1);
  const int64_t kOrderSpan =
      days_from_civil(1998, 8, 2) - kOrderEpoch + 1;  // inclusive day range
  const int64_t kStatusCut = days_from_civil(1995, 6, 17);

  // region
  {
    TableSink t("region", dir,
                {{"r_regionkey", CsvDtype::I64},
                 {"r_name", CsvDtype::Str},
                 {"r_comment", CsvDtype::Str}});
    SplitMix r = table_rng(seed, 0);
    std::vector<int64_t> keys;
    std::vector<std::string> names, comments;
    for (int64_t k = 0; k < 5; ++k) {
      keys.push_back(k);
      names.push_back(kRegionNames[k]);
      comments.push_back(make_comment(r));
      t.row({std::to_string(k), names.back(), comments.back()});
    }
    FrameBuilder b(5);
    b.add_i64("r_regionkey", std::move(keys));
    add_string_auto(b, "r_name", names);
    add_string_auto(b, "r_comment", comments);
    manifest.tables.push_back(t.finish(b.build()));
  }

  // nation
  {
    TableSink t("nation", dir,
                {{"n_nationkey", CsvDtype::I64},
                 {"n_name", CsvDtype::Str},
                 {"n_regionkey", CsvDtype::I64},
                 {"n_comment", CsvDtype::Str}});
    SplitMix r = table_rng(seed, 1);
    std::vector<int64_t> keys, regions;
    std::vector<std::string> names, comments;
    for (int64_t k = 0; k < 25; ++k) {
      keys.push_back(k);
      names.push_back(kNations[k].name);
      regions.push_back(kNations[k].region);
      comments.push_back(make_comment(r));
      t.row({std::to_string(k), names.back(), std::to_string(regions.back()),
             comments.back()});
    }
    FrameBuilder b(25);
    b.add_i64("n_nationkey", std::move(keys));
    add_string_auto(b, "n_name", names);
    b.add_i64("n_regionkey", std::move(regions));
    add_string_auto(b, "n_comment", comments);
    manifest.tables.push_back(t.finish(b.build()));
  }

  // supplier
  std::vector<int64_t> supp_nation(n_supp);
  {
    TableSink t("supplier", dir,
                {{"s_suppkey", CsvDtype::I64},
                 {"s_name", CsvDtype::Str},
                 {"s_nationkey", CsvDtype::I64},
                 {"s_acctbal", CsvDtype::F64},
                 {"s_comment", CsvDtype::Str}});
    SplitMix r = table_rng(seed, 2);
    std::vector<int64_t> keys(n_supp), nations(n_supp);
    std::vector<double> bal(n_supp);
    std::vector<std::string> names(n_supp), comments(n_supp);
    for (uint64_t i = 0; i < n_supp; ++i) {
      keys[i] = int64_t(i + 1);
      names[i] = pad_key_name("Supplier", i + 1);
      nations[i] = int64_t(r.below(25));
      int64_t cents = r.range(-99999, 999999);
      bal[i] = money_f64(cents);
      comments[i] = make_comment(r);
      supp_nation[i] = nations[i];
      t.row({std::to_string(keys[i]), names[i], std::to_string(nations[i]),
             money(cents), comments[i]});
    }
    FrameBuilder b(n_supp);
    b.add_i64("s_suppkey", std::move(keys));
    add_string_auto(b, "s_name", names);
    b.add_i64("s_nationkey", std::move(nations));
    b.add_f64("s_acctbal", std::move(bal));
    add_string_auto(b, "s_comment", comments);
    manifest.tables.push_back(t.finish(b.build()));
  }

  // customer
  {
    TableSink t("customer", dir,
                {{"c_custkey", CsvDtype::I64},
                 {"c_name", CsvDtype::Str},
                 {"c_nationkey", CsvDtype::I64},
                 {"c_mktsegment", CsvDtype::Str},
                 {"c_acctbal", CsvDtype::F64},
                 {"c_comment", CsvDtype::Str}});
    SplitMix r = table_rng(seed, 3);
    std::vector<int64_t> keys(n_cust), nations(n_cust);
    std::vector<double> bal(n_cust);
    std::vector<std::string> names(n_cust), segs(n_cust), comments(n_cust);
    for (uint64_t i = 0; i < n_cust; ++i) {
      keys[i] = int64_t(i + 1);
      names[i] = pad_key_name("Customer", i + 1);
      nations[i] = int64_t(r.below(25));
      segs[i] = kSegments[r.below(5)];
      int64_t cents = r.range(-99999, 999999);
      bal[i] = money_f64(cents);
      comments[i] = make_comment(r);
      t.row({std::to_string(keys[i]), names[i], std::to_string(nations[i]),
             segs[i], money(cents), comments[i]});
    }
    FrameBuilder b(n_cust);
    b.add_i64("c_custkey", std::move(keys));
    add_string_auto(b, "c_name", names);
    b.add_i64("c_nationkey", std::move(nations));
    add_string_auto(b, "c_mktsegment", segs);
    b.add_f64("c_acctbal", std::move(bal));
    add_string_auto(b, "c_comment", comments);
    manifest.tables.push_back(t.finish(b.build()));
  }

  // part
  std::vector<int64_t> part_price_cents(n_part);
  {
    TableSink t("part", dir,
                {{"p_partkey", CsvDtype::I64},
                 {"p_name", CsvDtype::Str},
                 {"p_type", CsvDtype::Str},
                 {"p_retailprice", CsvDtype::F64},
                 {"p_comment", CsvDtype::Str}});
    SplitMix r = table_rng(seed, 4);
    std::vector<int64_t> keys(n_part);
    std::vector<double> price(n_part);
    std::vector<std::string> names(n_part), types(n_part), comments(n_part);
    for (uint64_t i = 0; i < n_part; ++i) {
      keys[i] = int64_t(i + 1);
      std::string nm = kPartWords[r.below(kNumPartWords)];
      for (int w = 0; w < 2; ++w) {
        nm += ' ';
        nm += kPartWords[r.below(kNumPartWords)];
      }
      names[i] = std::move(nm);
      types[i] = std::string(kTypeA[r.below(6)]) + ' ' + kTypeB[r.below(5)] +
                 ' ' + kTypeC[r.below(5)];
      int64_t cents = 90000 + int64_t(r.below(110001));
      part_price_cents[i] = cents;
      price[i] = money_f64(cents);
      comments[i] = make_comment(r);
      t.row({std::to_string(keys[i]), names[i], types[i], money(cents),
             comments[i]});
    }
    FrameBuilder b(n_part);
    b.add_i64("p_partkey", std::move(keys));
    add_string_auto(b, "p_name", names);
    add_string_auto(b, "p_type", types);
    b.add_f64("p_retailprice", std::move(price));
    add_string_auto(b, "p_comment", comments);
    manifest.tables.push_back(t.finish(b.build()));
  }

  // partsupp: lines_per_part suppliers per part, distinct by strided pick.
  const uint64_t n_ps = n_part * lines_per_part;
  std::vector<int64_t> ps_part(n_ps), ps_supp(n_ps);
  {
    TableSink t("partsupp", dir,
                {{"ps_partkey", CsvDtype::I64},
                 {"ps_suppkey", CsvDtype::I64},
                 {"ps_availqty", CsvDtype::I64},
                 {"ps_supplycost", CsvDtype::F64},
                 {"ps_comment", CsvDtype::Str}});
    SplitMix r = table_rng(seed, 5);
    std::vector<int64_t> avail(n_ps);
    std::vector<double> cost(n_ps);
    std::vector<std::string> comments(n_ps);
    const uint64_t stride = std::max<uint64_t>(1, n_supp / 4);
    uint64_t row = 0;
    for (uint64_t p = 1; p <= n_part; ++p) {
      for (uint64_t j = 0; j < lines_per_part; ++j, ++row) {
        ps_part[row] = int64_t(p);
        ps_supp[row] = int64_t(((p - 1) + j * stride) % n_supp + 1);
        avail[row] = 1 + int64_t(r.below(9999));
        int64_t cents = 100 + int64_t(r.below(99901));
        cost[row] = money_f64(cents);
        comments[row] = make_comment(r);
        t.row({std::to_string(ps_part[row]), std::to_string(ps_supp[row]),
               std::to_string(avail[row]), money(cents), comments[row]});
      }
    }
    FrameBuilder b(n_ps);
    b.add_i64("ps_partkey", std::vector<int64_t>(ps_part));
    b.add_i64("ps_suppkey", std::vector<int64_t>(ps_supp));
    b.add_i64("ps_availqty", std::move(avail));
    b.add_f64("ps_supplycost", std::move(cost));
    add_string_auto(b, "ps_comment", comments);
    manifest.tables.push_back(t.finish(b.build()));
  }

  // orders: customers whose key is divisible by three never place orders, so
  // zero-count customers exist for the count-fill query path.
  std::vector<int64_t> order_date(n_orders);
  {
    TableSink t("orders", dir,
                {{"o_orderkey", CsvDtype::I64},
                 {"o_custkey", CsvDtype::I64},
                 {"o_orderstatus", CsvDtype::Str},
                 {"o_totalprice", CsvDtype::F64},
                 {"o_orderdate", CsvDtype::Date},
                 {"o_orderpriority", CsvDtype::Str},
                 {"o_comment", CsvDtype::Str}});
    SplitMix r = table_rng(seed, 6);
    std::vector<int64_t> eligible;
    for (uint64_t c = 1; c <= n_cust; ++c)
      if (c % 3 != 0) eligible.push_back(int64_t(c));
    std::vector<int64_t> keys(n_orders), cust(n_orders), dates(n_orders);
    std::vector<double> total(n_orders);
    std::vector<std::string> status(n_orders), prio(n_orders), comments(n_orders);
    for (uint64_t i = 0; i < n_orders; ++i) {
      keys[i] = int64_t(i + 1);
      cust[i] = eligible[r.below(eligible.size())];
      dates[i] = kOrderEpoch + int64_t(r.below(uint64_t(kOrderSpan)));
      order_date[i] = dates[i];
      status[i] = kOrderStatus[r.below(3)];
      int64_t cents = r.range(100000, 50000000);
      total[i] = money_f64(cents);
      prio[i] = kPriorities[r.below(5)];
      comments[i] = make_order_comment(r);
      t.row({std::to_string(keys[i]), std::to_string(cust[i]), status[i],
             money(cents), format_date(dates[i]), prio[i], comments[i]});
    }
    FrameBuilder b(n_orders);
    b.add_i64("o_orderkey", std::move(keys));
    b.add_i64("o_custkey", std::move(cust));
    add_string_auto(b, "o_orderstatus", status);
    b.add_f64("o_totalprice", std::move(total));
    b.add_date("o_orderdate", std::move(dates));
    add_string_auto(b, "o_orderpriority", prio);
    add_string_auto(b, "o_comment", comments);
    manifest.tables.push_back(t.finish(b.build()));
  }

  // lineitem: (partkey, suppkey) is always an existing partsupp pair.
  {
    TableSink t("lineitem", dir,
                {{"l_orderkey", CsvDtype::I64},
                 {"l_partkey", CsvDtype::I64},
                 {"l_suppkey", CsvDtype::I64},
                 {"l_quantity", CsvDtype::I64},
                 {"l_extendedprice", CsvDtype::F64},
                 {"l_discount", CsvDtype::F64},
                 {"l_tax", CsvDtype::F64},
                 {"l_returnflag", CsvDtype::Str},
                 {"l_linestatus", CsvDtype::Str},
                 {"l_shipdate", CsvDtype::Date}});
    SplitMix r = table_rng(seed, 7);
    std::vector<int64_t> okey, pkey, skey, qty, ship;
    std::vector<double> eprice, disc, tax;
    std::vector<std::string> rflag, lstatus;
    const size_t guess = size_t(n_orders) * 4;
    okey.reserve(guess); pkey.reserve(guess); skey.reserve(guess);
    qty.reserve(guess); ship.reserve(guess);
    eprice.reserve(guess); disc.reserve(guess); tax.reserve(guess);
    rflag.reserve(guess); lstatus.reserve(guess);
    for (uint64_t o = 0; o < n_orders; ++o) {
      uint64_t n_lines = 1 + r.below(7);
      for (uint64_t l = 0; l < n_lines; ++l) {
        uint64_t ps = r.below(n_ps);
        int64_t q = 1 + int64_t(r.below(50));
        int64_t price_cents = q * part_price_cents[ps_part[ps] - 1];
        int64_t disc_cents = int64_t(r.below(11));
        int64_t tax_cents = int64_t(r.below(9));
        int64_t ship_day = order_date[o] + 1 + int64_t(r.below(121));
        const char* flag =
            ship_day <= kStatusCut ? (r.chance(0.5) ? "R" : "A") : "N";
        okey.push_back(int64_t(o + 1));
        pkey.push_back(ps_part[ps]);
        skey.push_back(ps_supp[ps]);
        qty.push_back(q);
        eprice.push_back(money_f64(price_cents));
        disc.push_back(money_f64(disc_cents));
        tax.push_back(money_f64(tax_cents));
        rflag.push_back(flag);
        lstatus.push_back(ship_day > kStatusCut ? "O" : "F");
        ship.push_back(ship_day);
        t.row({std::to_string(okey.back()), std::to_string(pkey.back()),
               std::to_string(skey.back()), std::to_string(q),
               money(price_cents), money(disc_cents), money(tax_cents),
               rflag.back(), lstatus.back(), format_date(ship_day)});
      }
    }
    const size_t n_li = okey.size();
    FrameBuilder b(n_li);
    b.add_i64("l_orderkey", std::move(okey));
    b.add_i64("l_partkey", std::move(pkey));
    b.add_i64("l_suppkey", std::move(skey));
    b.add_i64("l_quantity", std::move(qty));
    b.add_f64("l_extendedprice", std::move(eprice));
    b.add_f64("l_discount", std::move(disc));
    b.add_f64("l_tax", std::move(tax));
    add_string_auto(b, "l_returnflag", rflag);
    add_string_auto(b, "l_linestatus", lstatus);
    b.add_date("l_shipdate", std::move(ship));
    manifest.tables.push_back(t.finish(b.build()));
  }

  // manifest.json
  {
    nlohmann::json tables = nlohmann::json::array();
    char hex[32];
    for (const auto& tb : manifest.tables) {
      nlohmann::json e{{"name", tb.name},
                       {"rows", tb.rows},
                       {"csv", tb.csv_path},
                       {"schema", tb.schema_path},
                       {"mfb", tb.mfb_path}};
      std::snprintf(hex, sizeof hex, "%016" PRIx64, tb.csv_hash);
      e["csv_hash"] = hex;
      std::snprintf(hex, sizeof hex, "%016" PRIx64, tb.mfb_hash);
      e["mfb_hash"] = hex;
      tables.push_back(std::move(e));
    }
    nlohmann::json j{
        {"scale", manifest.scale}, {"seed", manifest.seed}, {"tables", tables}};
    std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: manifest.json");
    out << j.dump(2) << '\n';
    if (!out) throw Error("write failed: manifest.json");
  }
  return manifest;
}

}  // namespace cardframe
