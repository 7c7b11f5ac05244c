#include "cardframe/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "cardframe/date.hpp"
#include "cardframe/encoding.hpp"

namespace cardframe {

namespace {

bool plain_is_string(PlainDtype d) { return d == PlainDtype::Str; }
bool plain_is_int(PlainDtype d) {
  return d == PlainDtype::I64 || d == PlainDtype::Date;
}

// Key equality is bit-pattern for Float64 (so -0.0 and 0.0 are distinct keys
// and a NaN equals itself), exact for everything else — the same notion of
// equality the main engine's raw-cell key words induce.
bool key_value_equal(const PlainValue& a, const PlainValue& b) {
  if (a.index() != b.index()) return false;
  if (std::holds_alternative<int64_t>(a))
    return std::get<int64_t>(a) == std::get<int64_t>(b);
  if (std::holds_alternative<double>(a))
    return std::bit_cast<uint64_t>(std::get<double>(a)) ==
           std::bit_cast<uint64_t>(std::get<double>(b));
  return std::get<std::string>(a) == std::get<std::string>(b);
}

bool key_rows_equal(const std::vector<PlainValue>& a,
                    const std::vector<PlainValue>& b,
                    const std::vector<size_t>& cols) {
  for (size_t c : cols)
    if (!key_value_equal(a[c], b[c])) return false;
  return true;
}

}  // namespace

size_t PlainTable::col(std::string_view name) const {
  for (size_t j = 0; j < names.size(); ++j)
    if (names[j] == name) return j;
  throw NameError(std::string(name));
}

PlainTable to_plain(const Frame& f) {
  PlainTable t;
  t.names = f.names();
  const size_t n = f.n_rows(), k = f.n_cols();
  t.dtypes.resize(k);
  std::vector<ColumnView> views;
  views.reserve(k);
  for (size_t j = 0; j < k; ++j) {
    views.push_back(f.column(j));
    switch (views[j].dtype()) {
      case LogicalDtype::Int64: t.dtypes[j] = PlainDtype::I64; break;
      case LogicalDtype::Float64: t.dtypes[j] = PlainDtype::F64; break;
      case LogicalDtype::Date: t.dtypes[j] = PlainDtype::Date; break;
      default: t.dtypes[j] = PlainDtype::Str; break;
    }
  }
  t.rows.resize(n);
  for (size_t i = 0; i < n; ++i) {
    auto& row = t.rows[i];
    row.reserve(k);
    for (size_t j = 0; j < k; ++j) {
      switch (t.dtypes[j]) {
        case PlainDtype::I64:
        case PlainDtype::Date: row.emplace_back(views[j].i64(i)); break;
        case PlainDtype::F64: row.emplace_back(views[j].f64(i)); break;
        case PlainDtype::Str: row.emplace_back(std::string(views[j].str(i))); break;
      }
    }
  }
  return t;
}

Frame from_plain(const PlainTable& t, double threshold) {
  const size_t n = t.n_rows();
  FrameBuilder b(n);
  for (size_t j = 0; j < t.n_cols(); ++j) {
    switch (t.dtypes[j]) {
      case PlainDtype::I64: {
        std::vector<int64_t> v(n);
        for (size_t i = 0; i < n; ++i) v[i] = std::get<int64_t>(t.rows[i][j]);
        b.add_i64(t.names[j], std::move(v));
        break;
      }
      case PlainDtype::Date: {
        std::vector<int64_t> v(n);
        for (size_t i = 0; i < n; ++i) v[i] = std::get<int64_t>(t.rows[i][j]);
        b.add_date(t.names[j], std::move(v));
        break;
      }
      case PlainDtype::F64: {
        std::vector<double> v(n);
        for (size_t i = 0; i < n; ++i) v[i] = std::get<double>(t.rows[i][j]);
        b.add_f64(t.names[j], std::move(v));
        break;
      }
      case PlainDtype::Str: {
        std::vector<std::string> v(n);
        for (size_t i = 0; i < n; ++i) v[i] = std::get<std::string>(t.rows[i][j]);
        add_string_auto(b, t.names[j], v, threshold);
        break;
      }
    }
  }
  return b.build();
}

// O(|s| * |p|) dynamic program, the textbook formulation — intentionally a
// different algorithm from the engine's backtracking matcher.
bool plain_like_match(std::string_view s, std::string_view pattern) {
  const size_t n = s.size(), m = pattern.size();
  std::vector<uint8_t> prev(m + 1, 0), cur(m + 1, 0);
  prev[0] = 1;
  for (size_t j = 1; j <= m; ++j)
    prev[j] = (pattern[j - 1] == '%' && prev[j - 1]) ? 1 : 0;
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = 0;
    for (size_t j = 1; j <= m; ++j) {
      char p = pattern[j - 1];
      if (p == '%')
        cur[j] = (cur[j - 1] || prev[j]) ? 1 : 0;
      else if (p == '_')
        cur[j] = prev[j - 1];
      else
        cur[j] = (prev[j - 1] && s[i - 1] == p) ? 1 : 0;
    }
    std::swap(prev, cur);
  }
  return prev[m] != 0;
}

namespace {

// ---- per-row expression interpreter -------------------------------------

enum class OCls : uint8_t { Bool, I64, F64, Str };

bool o_numeric(OCls c) { return c == OCls::I64 || c == OCls::F64; }

// Static class inference with the same acceptance rules and failure modes as
// the main engine's bind step (NameError for unknown columns, ExprError for
// type mistakes), so both engines reject the same trees — even on 0 rows.
OCls infer_cls(const PlainTable& t, const ExprNode& e) {
  using K = ExprNode::Kind;
  auto child = [&](size_t i) -> const ExprNode& {
    if (i >= e.children.size() || !e.children[i])
      throw ExprError("null expression operand");
    return *e.children[i];
  };
  switch (e.kind) {
    case K::ColumnRef:
      switch (t.dtypes[t.col(e.name)]) {
        case PlainDtype::I64:
        case PlainDtype::Date: return OCls::I64;
        case PlainDtype::F64: return OCls::F64;
        case PlainDtype::Str: return OCls::Str;
      }
      throw ExprError("unknown column dtype");
    case K::LiteralI64:
    case K::LiteralDate: return OCls::I64;
    case K::LiteralF64: return OCls::F64;
    case K::LiteralStr: return OCls::Str;
    case K::Compare: {
      OCls a = infer_cls(t, child(0)), b = infer_cls(t, child(1));
      if (a == OCls::Str && b == OCls::Str) return OCls::Bool;
      if (o_numeric(a) && o_numeric(b)) return OCls::Bool;
      throw ExprError("compare: operands must both be numeric or both string");
    }
    case K::Logic: {
      if (infer_cls(t, child(0)) != OCls::Bool)
        throw ExprError("logic: operand is not boolean");
      if (e.logic != LogicOp::Not && infer_cls(t, child(1)) != OCls::Bool)
        throw ExprError("logic: operand is not boolean");
      return OCls::Bool;
    }
    case K::Arith: {
      OCls a = infer_cls(t, child(0)), b = infer_cls(t, child(1));
      if (!o_numeric(a) || !o_numeric(b))
        throw ExprError("arith: operands must be numeric");
      bool f64 = a == OCls::F64 || b == OCls::F64 || e.arith == ArithOp::Div;
      return f64 ? OCls::F64 : OCls::I64;
    }
    case K::Between: {
      for (int i = 0; i < 3; ++i)
        if (!o_numeric(infer_cls(t, child(i))))
          throw ExprError("between: all operands must be numeric");
      return OCls::Bool;
    }
    case K::InSet: {
      OCls c = infer_cls(t, child(0));
      if (e.set_is_string) {
        if (c != OCls::Str)
          throw ExprError("in_set: string set against non-string column");
      } else if (c != OCls::I64) {
        throw ExprError("in_set: integer set against non-integer column");
      }
      return OCls::Bool;
    }
    case K::Like:
    case K::StartsWith:
    case K::EndsWith:
    case K::Contains: {
      if (infer_cls(t, child(0)) != OCls::Str)
        throw ExprError("string predicate on non-string operand");
      return OCls::Bool;
    }
  }
  throw ExprError("unknown expression node");
}

struct OVal {
  OCls cls = OCls::Bool;
  bool b = false;
  int64_t i = 0;
  double d = 0;
  std::string s;

  double as_f64() const { return cls == OCls::F64 ? d : double(i); }
};

bool cmp_apply(CmpOp op, int c) {  // c = -1/0/+1 three-way result
  switch (op) {
    case CmpOp::Eq: return c == 0;
    case CmpOp::Ne: return c != 0;
    case CmpOp::Lt: return c < 0;
    case CmpOp::Le: return c <= 0;
    case CmpOp::Gt: return c > 0;
    case CmpOp::Ge: return c >= 0;
  }
  return false;
}

bool compare_vals(CmpOp op, const OVal& a, const OVal& b) {
  if (a.cls == OCls::Str) {
    int c = a.s == b.s ? 0 : (a.s < b.s ? -1 : 1);
    return cmp_apply(op, c);
  }
  if (a.cls == OCls::F64 || b.cls == OCls::F64) {
    // IEEE semantics: any comparison against NaN is false except Ne.
    double x = a.as_f64(), y = b.as_f64();
    switch (op) {
      case CmpOp::Eq: return x == y;
      case CmpOp::Ne: return x != y;
      case CmpOp::Lt: return x < y;
      case CmpOp::Le: return x <= y;
      case CmpOp::Gt: return x > y;
      case CmpOp::Ge: return x >= y;
    }
    return false;
  }
  int c = a.i == b.i ? 0 : (a.i < b.i ? -1 : 1);
  return cmp_apply(op, c);
}

OVal row_eval(const PlainTable& t, const std::vector<PlainValue>& row,
              const ExprNode& e) {
  using K = ExprNode::Kind;
  OVal out;
  switch (e.kind) {
    case K::ColumnRef: {
      size_t j = t.col(e.name);
      switch (t.dtypes[j]) {
        case PlainDtype::I64:
        case PlainDtype::Date:
          out.cls = OCls::I64;
          out.i = std::get<int64_t>(row[j]);
          return out;
        case PlainDtype::F64:
          out.cls = OCls::F64;
          out.d = std::get<double>(row[j]);
          return out;
        case PlainDtype::Str:
          out.cls = OCls::Str;
          out.s = std::get<std::string>(row[j]);
          return out;
      }
      throw ExprError("unknown column dtype");
    }
    case K::LiteralI64:
    case K::LiteralDate:
      out.cls = OCls::I64;
      out.i = e.i64;
      return out;
    case K::LiteralF64:
      out.cls = OCls::F64;
      out.d = e.f64;
      return out;
    case K::LiteralStr:
      out.cls = OCls::Str;
      out.s = e.str;
      return out;
    case K::Compare: {
      OVal a = row_eval(t, row, *e.children[0]);
      OVal b = row_eval(t, row, *e.children[1]);
      out.cls = OCls::Bool;
      out.b = compare_vals(e.cmp, a, b);
      return out;
    }
    case K::Logic: {
      OVal a = row_eval(t, row, *e.children[0]);
      out.cls = OCls::Bool;
      if (e.logic == LogicOp::Not) {
        out.b = !a.b;
      } else {
        OVal b = row_eval(t, row, *e.children[1]);
        out.b = e.logic == LogicOp::And ? (a.b && b.b) : (a.b || b.b);
      }
      return out;
    }
    case K::Arith: {
      OVal a = row_eval(t, row, *e.children[0]);
      OVal b = row_eval(t, row, *e.children[1]);
      bool f64 = a.cls == OCls::F64 || b.cls == OCls::F64 ||
                 e.arith == ArithOp::Div;
      if (!f64) {
        // Unsigned intermediates: Int64 arithmetic wraps around.
        uint64_t x = uint64_t(a.i), y = uint64_t(b.i);
        uint64_t r = e.arith == ArithOp::Add   ? x + y
                     : e.arith == ArithOp::Sub ? x - y
                                               : x * y;
        out.cls = OCls::I64;
        out.i = int64_t(r);
        return out;
      }
      double x = a.as_f64(), y = b.as_f64();
      out.cls = OCls::F64;
      switch (e.arith) {
        case ArithOp::Add: out.d = x + y; break;
        case ArithOp::Sub: out.d = x - y; break;
        case ArithOp::Mul: out.d = x * y; break;
        case ArithOp::Div: out.d = x / y; break;  // IEEE inf/nan on zero
      }
      return out;
    }
    case K::Between: {
      OVal v = row_eval(t, row, *e.children[0]);
      OVal lo = row_eval(t, row, *e.children[1]);
      OVal hi = row_eval(t, row, *e.children[2]);
      out.cls = OCls::Bool;
      out.b = compare_vals(CmpOp::Ge, v, lo) && compare_vals(CmpOp::Le, v, hi);
      return out;
    }
    case K::InSet: {
      OVal v = row_eval(t, row, *e.children[0]);
      out.cls = OCls::Bool;
      if (e.set_is_string)
        out.b = std::find(e.str_set.begin(), e.str_set.end(), v.s) !=
                e.str_set.end();
      else
        out.b = std::find(e.i64_set.begin(), e.i64_set.end(), v.i) !=
                e.i64_set.end();
      return out;
    }
    case K::Like:
    case K::StartsWith:
    case K::EndsWith:
    case K::Contains: {
      OVal v = row_eval(t, row, *e.children[0]);
      out.cls = OCls::Bool;
      std::string_view s = v.s;
      switch (e.kind) {
        case K::Like: out.b = plain_like_match(s, e.str); break;
        case K::StartsWith: out.b = s.substr(0, e.str.size()) == e.str; break;
        case K::EndsWith:
          out.b = s.size() >= e.str.size() &&
                  s.substr(s.size() - e.str.size()) == e.str;
          break;
        default: out.b = s.find(e.str) != std::string_view::npos; break;
      }
      return out;
    }
  }
  throw ExprError("unknown expression node");
}

PlainTable table_like(const PlainTable& t) {
  PlainTable out;
  out.names = t.names;
  out.dtypes = t.dtypes;
  return out;
}

}  // namespace

PlainTable naive_filter(const PlainTable& t, const Expr& e) {
  if (!e) throw ExprError("null expression");
  if (infer_cls(t, *e) != OCls::Bool)
    throw ExprError("filter expression is not boolean");
  PlainTable out = table_like(t);
  for (const auto& row : t.rows)
    if (row_eval(t, row, *e).b) out.rows.push_back(row);
  return out;
}

PlainTable naive_compute(const PlainTable& t, const Expr& e,
                         const std::string& out_name) {
  if (!e) throw ExprError("null expression");
  OCls cls = infer_cls(t, *e);
  if (cls != OCls::I64 && cls != OCls::F64)
    throw ExprError("compute expression must yield a numeric value");
  for (const auto& name : t.names)
    if (name == out_name)
      throw NameError("duplicate column name: " + out_name, out_name);
  PlainTable out = table_like(t);
  out.names.push_back(out_name);
  out.dtypes.push_back(cls == OCls::I64 ? PlainDtype::I64 : PlainDtype::F64);
  out.rows = t.rows;
  for (auto& row : out.rows) {
    OVal v = row_eval(t, row, *e);
    if (cls == OCls::I64)
      row.emplace_back(v.i);
    else
      row.emplace_back(v.d);
  }
  return out;
}

PlainTable naive_groupby(const PlainTable& t, const std::vector<std::string>& keys,
                         const AggSpec& spec) {
  std::vector<size_t> key_cols;
  key_cols.reserve(keys.size());
  for (const auto& k : keys) key_cols.push_back(t.col(k));

  // Association list over key tuples: group ids in first-occurrence order.
  std::vector<size_t> group_first_row;
  std::vector<uint32_t> row_group(t.n_rows());
  if (keys.empty()) {
    group_first_row.push_back(0);  // one global group, even over 0 rows
    std::fill(row_group.begin(), row_group.end(), 0);
  } else {
    for (size_t i = 0; i < t.n_rows(); ++i) {
      size_t g = group_first_row.size();
      for (size_t e = 0; e < group_first_row.size(); ++e) {
        if (key_rows_equal(t.rows[i], t.rows[group_first_row[e]], key_cols)) {
          g = e;
          break;
        }
      }
      if (g == group_first_row.size()) group_first_row.push_back(i);
      row_group[i] = uint32_t(g);
    }
  }
  const size_t n_groups = group_first_row.size();

  PlainTable out;
  for (size_t c = 0; c < key_cols.size(); ++c) {
    out.names.push_back(keys[c]);
    out.dtypes.push_back(t.dtypes[key_cols[c]]);
  }
  out.rows.resize(n_groups);
  for (size_t g = 0; g < n_groups; ++g)
    for (size_t c : key_cols) out.rows[g].push_back(t.rows[group_first_row[g]][c]);

  for (const auto& item : spec) {
    size_t src = t.col(item.column);
    PlainDtype dt = t.dtypes[src];
    out.names.push_back(item.out_name);
    switch (item.fn) {
      case AggFn::Count: {
        std::vector<int64_t> cnt(n_groups, 0);
        for (size_t i = 0; i < t.n_rows(); ++i) cnt[row_group[i]]++;
        out.dtypes.push_back(PlainDtype::I64);
        for (size_t g = 0; g < n_groups; ++g) out.rows[g].emplace_back(cnt[g]);
        break;
      }
      case AggFn::Sum:
      case AggFn::Mean: {
        if (dt != PlainDtype::I64 && dt != PlainDtype::F64)
          throw AggError(
              std::string(item.fn == AggFn::Sum ? "sum" : "mean") +
              " needs a numeric column: " + item.column);
        if (item.fn == AggFn::Sum && dt == PlainDtype::I64) {
          std::vector<int64_t> acc(n_groups, 0);
          for (size_t i = 0; i < t.n_rows(); ++i) {
            int64_t v = std::get<int64_t>(t.rows[i][src]);
            int64_t* slot = &acc[row_group[i]];
            if (__builtin_add_overflow(*slot, v, slot))
              throw OverflowError("int64 sum overflow in column " + item.column);
          }
          out.dtypes.push_back(PlainDtype::I64);
          for (size_t g = 0; g < n_groups; ++g) out.rows[g].emplace_back(acc[g]);
          break;
        }
        std::vector<double> acc(n_groups, 0.0);
        std::vector<int64_t> cnt(n_groups, 0);
        for (size_t i = 0; i < t.n_rows(); ++i) {
          double v = dt == PlainDtype::F64
                         ? std::get<double>(t.rows[i][src])
                         : double(std::get<int64_t>(t.rows[i][src]));
          acc[row_group[i]] += v;
          cnt[row_group[i]]++;
        }
        out.dtypes.push_back(PlainDtype::F64);
        for (size_t g = 0; g < n_groups; ++g)
          out.rows[g].emplace_back(item.fn == AggFn::Sum
                                       ? acc[g]
                                       : acc[g] / double(cnt[g]));
        break;
      }
      case AggFn::Min:
      case AggFn::Max: {
        const bool want_min = item.fn == AggFn::Min;
        if (dt == PlainDtype::Str) {
          std::vector<std::string> best(n_groups);
          std::vector<uint8_t> seen(n_groups, 0);
          for (size_t i = 0; i < t.n_rows(); ++i) {
            uint32_t g = row_group[i];
            const std::string& v = std::get<std::string>(t.rows[i][src]);
            if (!seen[g] || (want_min ? v < best[g] : v > best[g])) {
              best[g] = v;
              seen[g] = 1;
            }
          }
          out.dtypes.push_back(PlainDtype::Str);
          for (size_t g = 0; g < n_groups; ++g)
            out.rows[g].emplace_back(std::move(best[g]));
          break;
        }
        if (dt == PlainDtype::F64) {
          std::vector<double> best(n_groups, 0.0);
          std::vector<uint8_t> seen(n_groups, 0);
          for (size_t i = 0; i < t.n_rows(); ++i) {
            uint32_t g = row_group[i];
            double v = std::get<double>(t.rows[i][src]);
            if (!seen[g] || (want_min ? v < best[g] : v > best[g])) {
              best[g] = v;
              seen[g] = 1;
            }
          }
          out.dtypes.push_back(PlainDtype::F64);
          for (size_t g = 0; g < n_groups; ++g) out.rows[g].emplace_back(best[g]);
          break;
        }
        std::vector<int64_t> best(n_groups, 0);
        std::vector<uint8_t> seen(n_groups, 0);
        for (size_t i = 0; i < t.n_rows(); ++i) {
          uint32_t g = row_group[i];
          int64_t v = std::get<int64_t>(t.rows[i][src]);
          if (!seen[g] || (want_min ? v < best[g] : v > best[g])) {
            best[g] = v;
            seen[g] = 1;
          }
        }
        out.dtypes.push_back(dt);  // Int64 stays Int64, Date stays Date
        for (size_t g = 0; g < n_groups; ++g) out.rows[g].emplace_back(best[g]);
        break;
      }
      case AggFn::CountDistinct: {
        std::vector<int64_t> cnt(n_groups, 0);
        std::vector<std::vector<PlainValue>> seen(n_groups);
        for (size_t i = 0; i < t.n_rows(); ++i) {
          uint32_t g = row_group[i];
          PlainValue v = t.rows[i][src];
          if (dt == PlainDtype::F64) {
            double d = std::get<double>(v);
            if (d == 0.0) d = 0.0;  // fold -0.0 into +0.0
            v = d;
          }
          bool fresh = true;
          for (const auto& w : seen[g])
            if (key_value_equal(v, w)) {
              fresh = false;
              break;
            }
          if (fresh) {
            seen[g].push_back(std::move(v));
            cnt[g]++;
          }
        }
        out.dtypes.push_back(PlainDtype::I64);
        for (size_t g = 0; g < n_groups; ++g) out.rows[g].emplace_back(cnt[g]);
        break;
      }
    }
  }
  return out;
}

namespace {

void check_join_keys(const PlainTable& l, const PlainTable& r,
                     const std::vector<std::pair<std::string, std::string>>& keys,
                     std::vector<size_t>& lc, std::vector<size_t>& rc) {
  if (keys.empty()) throw JoinError("join needs at least one key pair");
  const char* names[] = {"i64", "f64", "date", "str"};
  for (const auto& [lk, rk] : keys) {
    size_t a = l.col(lk), b = r.col(rk);
    PlainDtype ld = l.dtypes[a], rd = r.dtypes[b];
    bool ok = (plain_is_string(ld) && plain_is_string(rd)) ||
              (plain_is_int(ld) && plain_is_int(rd)) ||
              (ld == PlainDtype::F64 && rd == PlainDtype::F64);
    if (!ok)
      throw JoinError("incompatible key pair: " + lk + " (" +
                      names[size_t(ld)] + ") vs " + rk + " (" +
                      names[size_t(rd)] + ")");
    lc.push_back(a);
    rc.push_back(b);
  }
}

bool join_rows_match(const std::vector<PlainValue>& a,
                     const std::vector<PlainValue>& b,
                     const std::vector<size_t>& lc, const std::vector<size_t>& rc) {
  for (size_t j = 0; j < lc.size(); ++j) {
    const PlainValue& x = a[lc[j]];
    const PlainValue& y = b[rc[j]];
    // Int64 and Date keys may pair with each other; both hold int64_t.
    if (!key_value_equal(x, y)) return false;
  }
  return true;
}

}  // namespace

PlainTable naive_inner_join(
    const PlainTable& l, const PlainTable& r,
    const std::vector<std::pair<std::string, std::string>>& keys) {
  std::vector<size_t> lc, rc;
  check_join_keys(l, r, keys, lc, rc);

  // Right key columns are dropped; surviving right names that collide with a
  // left name get the "_right" suffix.
  std::vector<size_t> right_keep;
  for (size_t j = 0; j < r.n_cols(); ++j) {
    bool is_key = false;
    for (const auto& [lk, rk] : keys)
      if (r.names[j] == rk) is_key = true;
    if (!is_key) right_keep.push_back(j);
  }

  PlainTable out;
  out.names = l.names;
  out.dtypes = l.dtypes;
  for (size_t j : right_keep) {
    std::string name = r.names[j];
    bool clash = false;
    for (const auto& ln : l.names)
      if (ln == name) clash = true;
    out.names.push_back(clash ? name + "_right" : name);
    out.dtypes.push_back(r.dtypes[j]);
  }

  // Nested loops, left-major: left logical order, then right logical order.
  for (const auto& lrow : l.rows)
    for (const auto& rrow : r.rows)
      if (join_rows_match(lrow, rrow, lc, rc)) {
        auto row = lrow;
        for (size_t j : right_keep) row.push_back(rrow[j]);
        out.rows.push_back(std::move(row));
      }
  return out;
}

namespace {

PlainTable naive_filter_join(
    const PlainTable& l, const PlainTable& r,
    const std::vector<std::pair<std::string, std::string>>& keys,
    bool keep_matched) {
  std::vector<size_t> lc, rc;
  check_join_keys(l, r, keys, lc, rc);
  PlainTable out = table_like(l);
  for (const auto& lrow : l.rows) {
    bool matched = false;
    for (const auto& rrow : r.rows)
      if (join_rows_match(lrow, rrow, lc, rc)) {
        matched = true;
        break;
      }
    if (matched == keep_matched) out.rows.push_back(lrow);
  }
  return out;
}

}  // namespace

PlainTable naive_semi_join(
    const PlainTable& l, const PlainTable& r,
    const std::vector<std::pair<std::string, std::string>>& keys) {
  return naive_filter_join(l, r, keys, true);
}

PlainTable naive_anti_join(
    const PlainTable& l, const PlainTable& r,
    const std::vector<std::pair<std::string, std::string>>& keys) {
  return naive_filter_join(l, r, keys, false);
}

PlainTable naive_sort(const PlainTable& t, const std::vector<SortKey>& keys) {
  if (keys.empty()) throw Error("sort_by needs at least one key");
  std::vector<size_t> cols;
  for (const auto& k : keys) cols.push_back(t.col(k.name));

  std::vector<size_t> order(t.n_rows());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    for (size_t j = 0; j < cols.size(); ++j) {
      const PlainValue& x = t.rows[a][cols[j]];
      const PlainValue& y = t.rows[b][cols[j]];
      bool asc = keys[j].ascending;
      switch (t.dtypes[cols[j]]) {
        case PlainDtype::F64: {
          double u = std::get<double>(x), v = std::get<double>(y);
          if (u < v) return asc;
          if (v < u) return !asc;
          break;  // ties (and NaN pairs) fall through to the next key
        }
        case PlainDtype::Str: {
          const std::string& u = std::get<std::string>(x);
          const std::string& v = std::get<std::string>(y);
          if (u < v) return asc;
          if (v < u) return !asc;
          break;
        }
        default: {
          int64_t u = std::get<int64_t>(x), v = std::get<int64_t>(y);
          if (u < v) return asc;
          if (v < u) return !asc;
          break;
        }
      }
    }
    return false;
  });

  PlainTable out = table_like(t);
  out.rows.reserve(t.n_rows());
  for (size_t i : order) out.rows.push_back(t.rows[i]);
  return out;
}

PlainTable naive_limit(const PlainTable& t, size_t k) {
  PlainTable out = table_like(t);
  out.rows.assign(t.rows.begin(),
                  t.rows.begin() + std::min(k, t.rows.size()));
  return out;
}

PlainTable naive_distinct(const PlainTable& t,
                          const std::vector<std::string>& keys) {
  if (keys.empty()) throw Error("distinct needs at least one key");
  std::vector<size_t> cols;
  for (const auto& k : keys) cols.push_back(t.col(k));
  PlainTable out = table_like(t);
  std::vector<size_t> kept;
  for (size_t i = 0; i < t.n_rows(); ++i) {
    bool fresh = true;
    for (size_t e : kept)
      if (key_rows_equal(t.rows[i], t.rows[e], cols)) {
        fresh = false;
        break;
      }
    if (fresh) {
      kept.push_back(i);
      out.rows.push_back(t.rows[i]);
    }
  }
  return out;
}

PlainTable naive_concat(const PlainTable& a, const PlainTable& b) {
  if (a.names != b.names || a.dtypes != b.dtypes)
    throw Error("concat requires identical schemas");
  PlainTable out = table_like(a);
  out.rows = a.rows;
  out.rows.insert(out.rows.end(), b.rows.begin(), b.rows.end());
  return out;
}

PlainTable naive_select(const PlainTable& t,
                        const std::vector<std::string>& names) {
  std::vector<size_t> cols;
  for (const auto& n : names) cols.push_back(t.col(n));
  for (size_t i = 0; i < cols.size(); ++i)
    for (size_t j = i + 1; j < cols.size(); ++j)
      if (cols[i] == cols[j])
        throw NameError("duplicate column in selection: " + names[i], names[i]);
  PlainTable out;
  for (size_t c : cols) {
    out.names.push_back(t.names[c]);
    out.dtypes.push_back(t.dtypes[c]);
  }
  out.rows.resize(t.n_rows());
  for (size_t i = 0; i < t.n_rows(); ++i) {
    out.rows[i].reserve(cols.size());
    for (size_t c : cols) out.rows[i].push_back(t.rows[i][c]);
  }
  return out;
}

bool plain_equal(const PlainTable& a, const PlainTable& b, double rel_tol,
                 std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (a.names != b.names) return fail("column names differ");
  if (a.dtypes != b.dtypes) return fail("column dtypes differ");
  if (a.n_rows() != b.n_rows())
    return fail("row counts differ: " + std::to_string(a.n_rows()) + " vs " +
                std::to_string(b.n_rows()));
  for (size_t i = 0; i < a.n_rows(); ++i) {
    for (size_t j = 0; j < a.n_cols(); ++j) {
      const PlainValue& x = a.rows[i][j];
      const PlainValue& y = b.rows[i][j];
      bool ok;
      if (a.dtypes[j] == PlainDtype::F64) {
        double u = std::get<double>(x), v = std::get<double>(y);
        ok = std::bit_cast<uint64_t>(u) == std::bit_cast<uint64_t>(v);
        if (!ok) {
          double scale = std::max(std::fabs(u), std::fabs(v));
          ok = std::fabs(u - v) <= rel_tol * scale;
        }
      } else {
        ok = key_value_equal(x, y);
      }
      if (!ok) {
        if (why) {
          char buf[160];
          std::snprintf(buf, sizeof buf, "cell mismatch at row %zu, column %s",
                        i, a.names[j].c_str());
          *why = buf;
        }
        return false;
      }
    }
  }
  if (why) why->clear();
  return true;
}

}  // namespace cardframe
