#include "support/query_oracle.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "cardframe/date.hpp"
#include "cardframe/errors.hpp"
#include "cardframe/expr.hpp"
#include "cardframe/queries.hpp"

namespace cardframe::queryoracle {

namespace {

struct CsvLayout {
  std::vector<std::string> names;
  std::vector<PlainDtype> dtypes;
  char delimiter = '|';
};

CsvLayout load_layout(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open schema: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  CsvLayout lay;
  std::string d = j.value("delimiter", "|");
  lay.delimiter = d.empty() ? '|' : d[0];
  for (const auto& c : j.at("columns")) {
    lay.names.push_back(c.at("name").get<std::string>());
    std::string dt = c.at("dtype").get<std::string>();
    if (dt == "i64")
      lay.dtypes.push_back(PlainDtype::I64);
    else if (dt == "f64")
      lay.dtypes.push_back(PlainDtype::F64);
    else if (dt == "date")
      lay.dtypes.push_back(PlainDtype::Date);
    else
      lay.dtypes.push_back(PlainDtype::Str);
  }
  return lay;
}

int64_t parse_i64_field(const std::string& s) {
  char* end = nullptr;
  errno = 0;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || s.empty() || errno != 0)
    throw Error("reference parser: bad integer \"" + s + "\"");
  return int64_t(v);
}

double parse_f64_field(const std::string& s) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty())
    throw Error("reference parser: bad float \"" + s + "\"");
  return v;
}

int64_t parse_date_field(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-')
    throw Error("reference parser: bad date \"" + s + "\"");
  auto digits = [&](size_t pos, size_t n) {
    int64_t v = 0;
    for (size_t i = 0; i < n; ++i) {
      char c = s[pos + i];
      if (c < '0' || c > '9')
        throw Error("reference parser: bad date \"" + s + "\"");
      v = v * 10 + (c - '0');
    }
    return v;
  };
  return days_from_civil(digits(0, 4), unsigned(digits(5, 2)),
                         unsigned(digits(8, 2)));
}

Expr one_minus(const std::string& name) { return sub(lit(1.0), col(name)); }

PlainTable load_projected(const std::string& id, const std::string& data_dir,
                          const std::string& table) {
  PlainTable full = load_csv_table(data_dir, table);
  for (const auto& [name, cols] : query_columns(id))
    if (name == table) return naive_select(full, cols);
  throw Error("query " + id + " does not read table " + table);
}

PlainTable ref_q1(const std::string& dir) {
  PlainTable li = load_projected("q1", dir, "lineitem");
  li = naive_filter(li, le(col("l_shipdate"), lit_date("1998-09-02")));
  li = naive_compute(
      li, mul(col("l_extendedprice"), one_minus("l_discount")), "disc_price");
  li = naive_compute(li,
                     mul(mul(col("l_extendedprice"), one_minus("l_discount")),
                         add(lit(1.0), col("l_tax"))),
                     "charge");
  AggSpec spec{{"l_quantity", AggFn::Sum, "sum_qty"},
               {"l_extendedprice", AggFn::Sum, "sum_base_price"},
               {"disc_price", AggFn::Sum, "sum_disc_price"},
               {"charge", AggFn::Sum, "sum_charge"},
               {"l_quantity", AggFn::Mean, "avg_qty"},
               {"l_extendedprice", AggFn::Mean, "avg_price"},
               {"l_discount", AggFn::Mean, "avg_disc"},
               {"l_quantity", AggFn::Count, "count_order"}};
  PlainTable g = naive_groupby(li, {"l_returnflag", "l_linestatus"}, spec);
  return naive_sort(g, {{"l_returnflag", true}, {"l_linestatus", true}});
}

PlainTable ref_q3(const std::string& dir) {
  PlainTable cust = naive_filter(load_projected("q3", dir, "customer"),
                                 eq(col("c_mktsegment"), lit("BUILDING")));
  PlainTable ord = naive_filter(load_projected("q3", dir, "orders"),
                                lt(col("o_orderdate"), lit_date("1995-03-15")));
  PlainTable li = naive_filter(load_projected("q3", dir, "lineitem"),
                               gt(col("l_shipdate"), lit_date("1995-03-15")));
  PlainTable oc = naive_inner_join(ord, cust, {{"o_custkey", "c_custkey"}});
  PlainTable j = naive_inner_join(li, oc, {{"l_orderkey", "o_orderkey"}});
  j = naive_compute(j, mul(col("l_extendedprice"), one_minus("l_discount")),
                    "revenue_item");
  PlainTable g = naive_groupby(j, {"l_orderkey", "o_orderdate"},
                               {{"revenue_item", AggFn::Sum, "revenue"}});
  g = naive_sort(
      g, {{"revenue", false}, {"o_orderdate", true}, {"l_orderkey", true}});
  return naive_limit(g, 10);
}

PlainTable ref_q5(const std::string& dir) {
  PlainTable reg = naive_filter(load_projected("q5", dir, "region"),
                                eq(col("r_name"), lit("ASIA")));
  PlainTable nat = naive_inner_join(load_projected("q5", dir, "nation"), reg,
                                    {{"n_regionkey", "r_regionkey"}});
  PlainTable cust = naive_inner_join(load_projected("q5", dir, "customer"),
                                     nat, {{"c_nationkey", "n_nationkey"}});
  PlainTable ord = naive_filter(
      load_projected("q5", dir, "orders"),
      logic_and(ge(col("o_orderdate"), lit_date("1994-01-01")),
                lt(col("o_orderdate"), lit_date("1995-01-01"))));
  PlainTable oc = naive_inner_join(ord, cust, {{"o_custkey", "c_custkey"}});
  PlainTable li = naive_inner_join(load_projected("q5", dir, "lineitem"), oc,
                                   {{"l_orderkey", "o_orderkey"}});
  PlainTable ls = naive_inner_join(li, load_projected("q5", dir, "supplier"),
                                   {{"l_suppkey", "s_suppkey"}});
  ls = naive_filter(ls, eq(col("c_nationkey"), col("s_nationkey")));
  ls = naive_compute(ls, mul(col("l_extendedprice"), one_minus("l_discount")),
                     "revenue_item");
  PlainTable g = naive_groupby(ls, {"n_name"},
                               {{"revenue_item", AggFn::Sum, "revenue"}});
  return naive_sort(g, {{"revenue", false}, {"n_name", true}});
}

PlainTable ref_q6(const std::string& dir) {
  Expr pred = logic_and(
      logic_and(ge(col("l_shipdate"), lit_date("1994-01-01")),
                lt(col("l_shipdate"), lit_date("1995-01-01"))),
      logic_and(between(col("l_discount"), lit(0.05), lit(0.07)),
                lt(col("l_quantity"), lit(int64_t(24)))));
  PlainTable li = naive_filter(load_projected("q6", dir, "lineitem"), pred);
  li = naive_compute(li, mul(col("l_extendedprice"), col("l_discount")),
                     "revenue_item");
  PlainTable g =
      naive_groupby(li, {}, {{"revenue_item", AggFn::Sum, "revenue"}});
  return naive_sort(g, {{"revenue", true}});
}

PlainTable with_year(PlainTable t, const std::string& date_col,
                     const std::string& out_name) {
  size_t j = t.col(date_col);
  t.names.push_back(out_name);
  t.dtypes.push_back(PlainDtype::I64);
  for (auto& row : t.rows)
    row.push_back(year_of(std::get<int64_t>(row[j])));
  return t;
}

PlainTable ref_q9(const std::string& dir) {
  PlainTable part = naive_filter(load_projected("q9", dir, "part"),
                                 like(col("p_name"), "%green%"));
  PlainTable li = naive_inner_join(load_projected("q9", dir, "lineitem"), part,
                                   {{"l_partkey", "p_partkey"}});
  li = naive_inner_join(li, load_projected("q9", dir, "supplier"),
                        {{"l_suppkey", "s_suppkey"}});
  li = naive_inner_join(
      li, load_projected("q9", dir, "partsupp"),
      {{"l_partkey", "ps_partkey"}, {"l_suppkey", "ps_suppkey"}});
  li = naive_inner_join(li, load_projected("q9", dir, "orders"),
                        {{"l_orderkey", "o_orderkey"}});
  li = naive_inner_join(li, load_projected("q9", dir, "nation"),
                        {{"s_nationkey", "n_nationkey"}});
  li = with_year(std::move(li), "o_orderdate", "o_year");
  li = naive_compute(li,
                     sub(mul(col("l_extendedprice"), one_minus("l_discount")),
                         mul(col("ps_supplycost"), col("l_quantity"))),
                     "amount");
  PlainTable g = naive_groupby(li, {"n_name", "o_year"},
                               {{"amount", AggFn::Sum, "sum_profit"}});
  return naive_sort(g, {{"n_name", true}, {"o_year", false}});
}

PlainTable ref_q13(const std::string& dir) {
  PlainTable ord =
      naive_filter(load_projected("q13", dir, "orders"),
                   logic_not(like(col("o_comment"), "%special%requests%")));
  PlainTable cust = load_projected("q13", dir, "customer");

  PlainTable matched =
      naive_inner_join(cust, ord, {{"c_custkey", "o_custkey"}});
  PlainTable counts = naive_groupby(matched, {"c_custkey"},
                                    {{"c_custkey", AggFn::Count, "c_count"}});

  PlainTable zero = naive_anti_join(cust, ord, {{"c_custkey", "o_custkey"}});
  zero.names.push_back("c_count");
  zero.dtypes.push_back(PlainDtype::I64);
  for (auto& row : zero.rows) row.push_back(int64_t(0));

  PlainTable all = naive_concat(counts, zero);
  PlainTable dist =
      naive_groupby(all, {"c_count"}, {{"c_count", AggFn::Count, "custdist"}});
  return naive_sort(dist, {{"custdist", false}, {"c_count", false}});
}

}  // namespace

PlainTable load_csv_table(const std::string& data_dir,
                          const std::string& table) {
  CsvLayout lay = load_layout(data_dir + "/" + table + ".schema.json");
  std::ifstream in(data_dir + "/" + table + ".csv", std::ios::binary);
  if (!in) throw Error("cannot open csv: " + data_dir + "/" + table + ".csv");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();

  PlainTable t;
  t.names = lay.names;
  t.dtypes = lay.dtypes;

  size_t pos = 0;
  std::vector<std::string> fields;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty() && pos >= text.size()) break;  // trailing newline

    fields.clear();
    size_t start = 0;
    while (true) {
      size_t d = line.find(lay.delimiter, start);
      if (d == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, d - start));
      start = d + 1;
    }
    if (fields.size() != lay.names.size())
      throw Error("reference parser: field count mismatch in " + table);

    std::vector<PlainValue> row;
    row.reserve(fields.size());
    for (size_t j = 0; j < fields.size(); ++j) {
      switch (lay.dtypes[j]) {
        case PlainDtype::I64: row.emplace_back(parse_i64_field(fields[j])); break;
        case PlainDtype::F64: row.emplace_back(parse_f64_field(fields[j])); break;
        case PlainDtype::Date: row.emplace_back(parse_date_field(fields[j])); break;
        case PlainDtype::Str: row.emplace_back(std::move(fields[j])); break;
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

PlainTable run_reference_query(const std::string& id,
                               const std::string& data_dir) {
  if (id == "q1") return ref_q1(data_dir);
  if (id == "q3") return ref_q3(data_dir);
  if (id == "q5") return ref_q5(data_dir);
  if (id == "q6") return ref_q6(data_dir);
  if (id == "q9") return ref_q9(data_dir);
  if (id == "q13") return ref_q13(data_dir);
  throw Error("unknown query: " + id);
}

}  // namespace cardframe::queryoracle
