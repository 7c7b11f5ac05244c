#include "cardframe/queries.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <map>

#include "cardframe/date.hpp"
#include "cardframe/encoding.hpp"
#include "cardframe/expr.hpp"
#include "cardframe/hash.hpp"
#include "cardframe/parallel.hpp"

namespace cardframe {

namespace {

const std::vector<std::string> kQueryIds = {"q1", "q3", "q5", "q6", "q9", "q13"};

using TableColumns = std::vector<std::pair<std::string, std::vector<std::string>>>;

double ms_since(std::chrono::steady_clock::time_point t0) {
  auto dt = std::chrono::steady_clock::now() - t0;
  return std::chrono::duration<double, std::milli>(dt).count();
}

// Calendar-year helper column; year extraction is not an expression node, so
// the pipeline appends it directly from the date cells.
Frame with_year_column(const Frame& f, const std::string& date_col,
                       const std::string& out_name) {
  Frame base = f.materialize();
  ColumnView c = base.column(date_col);
  const size_t n = base.n_rows();
  std::vector<Cell64> cells(n);
  for (size_t i = 0; i < n; ++i)
    cells[i] = std::bit_cast<Cell64>(year_of(c.i64(i)));
  return base.append_block_column(out_name, LogicalDtype::Int64,
                                  std::move(cells));
}

struct LoadedTables {
  std::map<std::string, Frame> frames;
  const Frame& at(const std::string& name) const { return frames.at(name); }
};

struct QueryKnobs {
  EvalOptions eval;
  GroupOptions group;
  JoinOptions join;
};

QueryKnobs knobs_of(const QueryOptions& opt) {
  QueryKnobs k;
  k.eval.chunk_size = opt.chunk_size;
  k.group.strategy = opt.groupby;
  k.group.hash = opt.hash;
  k.group.chunk_size = opt.chunk_size;
  k.join.algo = opt.join;
  k.join.hash = opt.hash;
  k.join.chunk_size = opt.chunk_size;
  return k;
}

Expr one_minus(const std::string& name) { return sub(lit(1.0), col(name)); }

Frame run_q1(const LoadedTables& t, const QueryKnobs& k) {
  Frame li = apply_filter(t.at("lineitem"),
                          le(col("l_shipdate"), lit_date("1998-09-02")), k.eval);
  li = eval_compute(li, mul(col("l_extendedprice"), one_minus("l_discount")),
                    "disc_price", k.eval);
  li = eval_compute(li,
                    mul(mul(col("l_extendedprice"), one_minus("l_discount")),
                        add(lit(1.0), col("l_tax"))),
                    "charge", k.eval);
  AggSpec spec{{"l_quantity", AggFn::Sum, "sum_qty"},
               {"l_extendedprice", AggFn::Sum, "sum_base_price"},
               {"disc_price", AggFn::Sum, "sum_disc_price"},
               {"charge", AggFn::Sum, "sum_charge"},
               {"l_quantity", AggFn::Mean, "avg_qty"},
               {"l_extendedprice", AggFn::Mean, "avg_price"},
               {"l_discount", AggFn::Mean, "avg_disc"},
               {"l_quantity", AggFn::Count, "count_order"}};
  Frame g = group_by(li, {"l_returnflag", "l_linestatus"}, spec, k.group);
  return g.sort_by({{"l_returnflag", true}, {"l_linestatus", true}});
}

Frame run_q3(const LoadedTables& t, const QueryKnobs& k) {
  Frame cust = apply_filter(t.at("customer"),
                            eq(col("c_mktsegment"), lit("BUILDING")), k.eval);
  Frame ord = apply_filter(t.at("orders"),
                           lt(col("o_orderdate"), lit_date("1995-03-15")), k.eval);
  Frame li = apply_filter(t.at("lineitem"),
                          gt(col("l_shipdate"), lit_date("1995-03-15")), k.eval);
  Frame oc = inner_join(ord, cust, {{"o_custkey", "c_custkey"}}, k.join);
  Frame j = inner_join(li, oc, {{"l_orderkey", "o_orderkey"}}, k.join);
  j = eval_compute(j, mul(col("l_extendedprice"), one_minus("l_discount")),
                   "revenue_item", k.eval);
  Frame g = group_by(j, {"l_orderkey", "o_orderdate"},
                     {{"revenue_item", AggFn::Sum, "revenue"}}, k.group);
  g = g.sort_by(
      {{"revenue", false}, {"o_orderdate", true}, {"l_orderkey", true}});
  return g.limit(10);
}

Frame run_q5(const LoadedTables& t, const QueryKnobs& k) {
  Frame reg = apply_filter(t.at("region"), eq(col("r_name"), lit("ASIA")), k.eval);
  Frame nat =
      inner_join(t.at("nation"), reg, {{"n_regionkey", "r_regionkey"}}, k.join);
  Frame cust =
      inner_join(t.at("customer"), nat, {{"c_nationkey", "n_nationkey"}}, k.join);
  Frame ord = apply_filter(
      t.at("orders"),
      logic_and(ge(col("o_orderdate"), lit_date("1994-01-01")),
                lt(col("o_orderdate"), lit_date("1995-01-01"))),
      k.eval);
  Frame oc = inner_join(ord, cust, {{"o_custkey", "c_custkey"}}, k.join);
  Frame li =
      inner_join(t.at("lineitem"), oc, {{"l_orderkey", "o_orderkey"}}, k.join);
  Frame ls =
      inner_join(li, t.at("supplier"), {{"l_suppkey", "s_suppkey"}}, k.join);
  // Local-supplier condition: the customer's nation is the supplier's nation.
  ls = apply_filter(ls, eq(col("c_nationkey"), col("s_nationkey")), k.eval);
  ls = eval_compute(ls, mul(col("l_extendedprice"), one_minus("l_discount")),
                    "revenue_item", k.eval);
  Frame g = group_by(ls, {"n_name"}, {{"revenue_item", AggFn::Sum, "revenue"}},
                     k.group);
  return g.sort_by({{"revenue", false}, {"n_name", true}});
}

Frame run_q6(const LoadedTables& t, const QueryKnobs& k) {
  Expr pred = logic_and(
      logic_and(ge(col("l_shipdate"), lit_date("1994-01-01")),
                lt(col("l_shipdate"), lit_date("1995-01-01"))),
      logic_and(between(col("l_discount"), lit(0.05), lit(0.07)),
                lt(col("l_quantity"), lit(int64_t(24)))));
  Frame li = apply_filter(t.at("lineitem"), pred, k.eval);
  li = eval_compute(li, mul(col("l_extendedprice"), col("l_discount")),
                    "revenue_item", k.eval);
  Frame g = group_by(li, {}, {{"revenue_item", AggFn::Sum, "revenue"}}, k.group);
  return g.sort_by({{"revenue", true}});
}

Frame run_q9(const LoadedTables& t, const QueryKnobs& k) {
  Frame part =
      apply_filter(t.at("part"), like(col("p_name"), "%green%"), k.eval);
  Frame li =
      inner_join(t.at("lineitem"), part, {{"l_partkey", "p_partkey"}}, k.join);
  li = inner_join(li, t.at("supplier"), {{"l_suppkey", "s_suppkey"}}, k.join);
  li = inner_join(li, t.at("partsupp"),
                  {{"l_partkey", "ps_partkey"}, {"l_suppkey", "ps_suppkey"}},
                  k.join);
  li = inner_join(li, t.at("orders"), {{"l_orderkey", "o_orderkey"}}, k.join);
  li = inner_join(li, t.at("nation"), {{"s_nationkey", "n_nationkey"}}, k.join);
  li = with_year_column(li, "o_orderdate", "o_year");
  li = eval_compute(li,
                    sub(mul(col("l_extendedprice"), one_minus("l_discount")),
                        mul(col("ps_supplycost"), col("l_quantity"))),
                    "amount", k.eval);
  Frame g = group_by(li, {"n_name", "o_year"},
                     {{"amount", AggFn::Sum, "sum_profit"}}, k.group);
  return g.sort_by({{"n_name", true}, {"o_year", false}});
}

Frame run_q13(const LoadedTables& t, const QueryKnobs& k) {
  Frame ord = apply_filter(
      t.at("orders"),
      logic_not(like(col("o_comment"), "%special%requests%")), k.eval);
  Frame cust = t.at("customer");

  // Customers with at least one qualifying order, with their order counts.
  Frame matched =
      inner_join(cust, ord, {{"c_custkey", "o_custkey"}}, k.join);
  Frame counts = group_by(matched, {"c_custkey"},
                          {{"c_custkey", AggFn::Count, "c_count"}}, k.group);

  // Customers with none: anti-join, then a literal zero count column.
  Frame zero =
      anti_join(cust, ord, {{"c_custkey", "o_custkey"}}, k.join).materialize();
  zero = zero.append_block_column(
      "c_count", LogicalDtype::Int64,
      std::vector<Cell64>(zero.n_rows(), std::bit_cast<Cell64>(int64_t(0))));

  Frame all = concat_rows(counts, zero);
  Frame dist = group_by(all, {"c_count"},
                        {{"c_count", AggFn::Count, "custdist"}}, k.group);
  return dist.sort_by({{"custdist", false}, {"c_count", false}});
}

}  // namespace

const std::vector<std::string>& catalog_query_ids() { return kQueryIds; }

bool is_catalog_query(const std::string& id) {
  for (const auto& q : kQueryIds)
    if (q == id) return true;
  return false;
}

TableColumns query_columns(const std::string& id) {
  if (id == "q1")
    return {{"lineitem",
             {"l_returnflag", "l_linestatus", "l_quantity", "l_extendedprice",
              "l_discount", "l_tax", "l_shipdate"}}};
  if (id == "q3")
    return {{"customer", {"c_custkey", "c_mktsegment"}},
            {"orders", {"o_orderkey", "o_custkey", "o_orderdate"}},
            {"lineitem",
             {"l_orderkey", "l_extendedprice", "l_discount", "l_shipdate"}}};
  if (id == "q5")
    return {{"region", {"r_regionkey", "r_name"}},
            {"nation", {"n_nationkey", "n_name", "n_regionkey"}},
            {"customer", {"c_custkey", "c_nationkey"}},
            {"orders", {"o_orderkey", "o_custkey", "o_orderdate"}},
            {"lineitem",
             {"l_orderkey", "l_suppkey", "l_extendedprice", "l_discount"}},
            {"supplier", {"s_suppkey", "s_nationkey"}}};
  if (id == "q6")
    return {{"lineitem",
             {"l_shipdate", "l_discount", "l_quantity", "l_extendedprice"}}};
  if (id == "q9")
    return {{"part", {"p_partkey", "p_name"}},
            {"supplier", {"s_suppkey", "s_nationkey"}},
            {"nation", {"n_nationkey", "n_name"}},
            {"partsupp", {"ps_partkey", "ps_suppkey", "ps_supplycost"}},
            {"orders", {"o_orderkey", "o_orderdate"}},
            {"lineitem",
             {"l_orderkey", "l_partkey", "l_suppkey", "l_quantity",
              "l_extendedprice", "l_discount"}}};
  if (id == "q13")
    return {{"customer", {"c_custkey"}},
            {"orders", {"o_custkey", "o_comment"}}};
  throw Error("unknown query: " + id);
}

QueryRun run_query(const std::string& id, const std::string& data_dir,
                   const QueryOptions& opt) {
  if (!is_catalog_query(id)) throw Error("unknown query: " + id);
  set_thread_budget(size_t(opt.threads < 1 ? 1 : opt.threads));
  QueryKnobs k = knobs_of(opt);

  QueryRun run;
  run.query = id;

  auto t0 = std::chrono::steady_clock::now();
  LoadedTables tables;
  for (const auto& [table, cols] : query_columns(id)) {
    ReadResult r = read_mfb(data_dir + "/" + table + ".mfb", cols);
    run.io.header_bytes += r.stats.header_bytes;
    run.io.payload_bytes += r.stats.payload_bytes;
    tables.frames.emplace(table, std::move(r.frame));
  }
  run.load_ms = ms_since(t0);

  auto t1 = std::chrono::steady_clock::now();
  if (id == "q1")
    run.result = run_q1(tables, k);
  else if (id == "q3")
    run.result = run_q3(tables, k);
  else if (id == "q5")
    run.result = run_q5(tables, k);
  else if (id == "q6")
    run.result = run_q6(tables, k);
  else if (id == "q9")
    run.result = run_q9(tables, k);
  else
    run.result = run_q13(tables, k);
  run.compute_ms = ms_since(t1);

  run.content_hash = content_hash(run.result);
  return run;
}

uint64_t content_hash(const Frame& f) {
  Digest64 d;
  d.add_u64(f.n_rows());
  d.add_u64(f.n_cols());
  const size_t n = f.n_rows(), k = f.n_cols();
  std::vector<ColumnView> views;
  std::vector<uint8_t> tags(k);  // value-class tag: encoding-independent
  views.reserve(k);
  for (size_t j = 0; j < k; ++j) {
    views.push_back(f.column(j));
    switch (views[j].dtype()) {
      case LogicalDtype::Int64: tags[j] = 0; break;
      case LogicalDtype::Float64: tags[j] = 1; break;
      case LogicalDtype::Date: tags[j] = 2; break;
      default: tags[j] = 3; break;  // both string encodings hash alike
    }
    d.add_bytes(f.names()[j]);
    d.add_u64(tags[j]);
  }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < k; ++j) {
      if (tags[j] == 3)
        d.add_bytes(views[j].str(i));
      else
        d.add_u64(views[j].raw(i));
    }
  return d.h;
}

Frame concat_rows(const Frame& a, const Frame& b) {
  if (a.n_cols() != b.n_cols())
    throw Error("concat requires identical schemas");
  const size_t n = a.n_rows() + b.n_rows();
  FrameBuilder out(n);
  for (size_t j = 0; j < a.n_cols(); ++j) {
    if (a.names()[j] != b.names()[j])
      throw Error("concat requires identical schemas");
    ColumnView ca = a.column(j);
    ColumnView cb = b.column(j);
    bool sa = ca.dtype() == LogicalDtype::DictCode ||
              ca.dtype() == LogicalDtype::RawString;
    bool sb = cb.dtype() == LogicalDtype::DictCode ||
              cb.dtype() == LogicalDtype::RawString;
    if (sa != sb || (!sa && ca.dtype() != cb.dtype()))
      throw Error("concat requires identical schemas");
    if (sa) {
      std::vector<std::string> vals;
      vals.reserve(n);
      for (size_t i = 0; i < a.n_rows(); ++i) vals.emplace_back(ca.str(i));
      for (size_t i = 0; i < b.n_rows(); ++i) vals.emplace_back(cb.str(i));
      add_string_auto(out, a.names()[j], vals);
    } else {
      std::vector<Cell64> cells;
      cells.reserve(n);
      for (size_t i = 0; i < a.n_rows(); ++i) cells.push_back(ca.raw(i));
      for (size_t i = 0; i < b.n_rows(); ++i) cells.push_back(cb.raw(i));
      out.add_cells(a.names()[j], ca.dtype(), std::move(cells));
    }
  }
  return out.build();
}

std::string format_table(const Frame& f, size_t max_rows) {
  const size_t n = f.n_rows(), k = f.n_cols();
  const size_t shown = std::min(n, max_rows);

  std::vector<ColumnView> views;
  views.reserve(k);
  for (size_t j = 0; j < k; ++j) views.push_back(f.column(j));

  auto cell_text = [&](size_t i, size_t j) -> std::string {
    char buf[64];
    switch (views[j].dtype()) {
      case LogicalDtype::Int64:
        std::snprintf(buf, sizeof buf, "%" PRId64, views[j].i64(i));
        return buf;
      case LogicalDtype::Float64:
        std::snprintf(buf, sizeof buf, "%.6f", views[j].f64(i));
        return buf;
      case LogicalDtype::Date:
        return format_date(views[j].i64(i));
      default:
        return std::string(views[j].str(i));
    }
  };

  std::vector<size_t> width(k);
  std::vector<std::vector<std::string>> cells(shown, std::vector<std::string>(k));
  for (size_t j = 0; j < k; ++j) width[j] = f.names()[j].size();
  for (size_t i = 0; i < shown; ++i)
    for (size_t j = 0; j < k; ++j) {
      cells[i][j] = cell_text(i, j);
      width[j] = std::max(width[j], cells[i][j].size());
    }

  std::string out;
  auto pad = [&](const std::string& s, size_t w) {
    out += s;
    out.append(w - s.size(), ' ');
  };
  for (size_t j = 0; j < k; ++j) {
    if (j) out += "  ";
    pad(f.names()[j], width[j]);
  }
  out += '\n';
  for (size_t j = 0; j < k; ++j) {
    if (j) out += "  ";
    out.append(width[j], '-');
  }
  out += '\n';
  for (size_t i = 0; i < shown; ++i) {
    for (size_t j = 0; j < k; ++j) {
      if (j) out += "  ";
      pad(cells[i][j], width[j]);
    }
    out += '\n';
  }
  if (shown < n)
    out += "... (" + std::to_string(n - shown) + " more rows)\n";
  return out;
}

}  // namespace cardframe
