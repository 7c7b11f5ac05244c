#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cardframe/frame.hpp"

namespace cardframe {

enum class CmpOp : uint8_t { Eq, Ne, Lt, Le, Gt, Ge };
enum class ArithOp : uint8_t { Add, Sub, Mul, Div };
enum class LogicOp : uint8_t { And, Or, Not };

struct ExprNode;
// Trees are immutable and stateless; sharing subtrees is safe, and the same
// tree evaluated twice on the same frame gives identical results.
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum class Kind : uint8_t {
    ColumnRef,
    LiteralI64,
    LiteralF64,
    LiteralDate,
    LiteralStr,
    Compare,
    Logic,
    Arith,
    Between,     // children: col, lo, hi; inclusive both ends, numeric only
    InSet,       // children: col; set in i64_set or str_set
    Like,        // children: col; pattern in str ('%' and '_', no escapes)
    StartsWith,  // children: col; literal in str
    EndsWith,
    Contains,
  };

  Kind kind{};
  std::string name;  // ColumnRef
  int64_t i64 = 0;   // LiteralI64 / LiteralDate (days)
  double f64 = 0;    // LiteralF64
  std::string str;   // LiteralStr / pattern / affix literal
  CmpOp cmp{};
  LogicOp logic{};
  ArithOp arith{};
  std::vector<Expr> children;
  std::vector<int64_t> i64_set;
  std::vector<std::string> str_set;
  bool set_is_string = false;
};

// Construction helpers. Literal-vs-literal type mismatches throw ExprError at
// build time; column typing is checked when the tree is bound to a frame.
Expr col(std::string name);
Expr lit(int64_t v);
Expr lit(double v);
Expr lit(std::string_view v);
Expr lit_date(std::string_view ymd);  // ExprError on malformed date
Expr lit_date_days(int64_t days);

Expr cmp_expr(CmpOp op, Expr lhs, Expr rhs);
Expr eq(Expr a, Expr b);
Expr ne(Expr a, Expr b);
Expr lt(Expr a, Expr b);
Expr le(Expr a, Expr b);
Expr gt(Expr a, Expr b);
Expr ge(Expr a, Expr b);

Expr logic_and(Expr a, Expr b);
Expr logic_or(Expr a, Expr b);
Expr logic_not(Expr a);

Expr arith_expr(ArithOp op, Expr lhs, Expr rhs);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr div(Expr a, Expr b);  // always Float64, IEEE semantics on zero divisors

Expr between(Expr column, Expr lo, Expr hi);
Expr in_set(Expr column, std::vector<int64_t> values);
Expr in_set(Expr column, std::vector<std::string> values);
Expr like(Expr column, std::string pattern);
Expr starts_with(Expr column, std::string prefix);
Expr ends_with(Expr column, std::string suffix);
Expr contains(Expr column, std::string needle);

// SQL LIKE with '%' (any run) and '_' (one byte); bytewise over UTF-8.
bool like_match(std::string_view s, std::string_view pattern);

struct EvalOptions {
  size_t chunk_size = 0;  // 0 = auto; results never depend on the choice
};

// Physical ids of passing rows, in ascending logical order.
std::vector<RowId> eval_mask(const Frame& f, const Expr& e, EvalOptions opt = {});
// View narrowed to passing rows; relative order preserved.
Frame apply_filter(const Frame& f, const Expr& e, EvalOptions opt = {});
// Appends e evaluated per logical row as a new block column (Float64, or
// Int64 for all-integer arithmetic). A filtered view is materialized first.
Frame eval_compute(const Frame& f, const Expr& e, const std::string& out_name,
                   EvalOptions opt = {});

}  // namespace cardframe
