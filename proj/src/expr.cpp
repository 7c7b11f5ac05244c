#include "cardframe/expr.hpp"

#include <functional>
#include <memory>
#include <unordered_set>

#include "cardframe/date.hpp"
#include "cardframe/parallel.hpp"

namespace cardframe {

/* ---------------- construction ---------------- */

namespace {

Expr make(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

bool is_literal(const ExprNode& e) {
  using K = ExprNode::Kind;
  return e.kind == K::LiteralI64 || e.kind == K::LiteralF64 ||
         e.kind == K::LiteralDate || e.kind == K::LiteralStr;
}

bool is_string_literal(const ExprNode& e) {
  return e.kind == ExprNode::Kind::LiteralStr;
}

void check_literal_mix(const Expr& a, const Expr& b, const char* what) {
  if (!a || !b) throw ExprError(std::string(what) + ": null operand");
  if (is_literal(*a) && is_literal(*b) &&
      is_string_literal(*a) != is_string_literal(*b))
    throw ExprError(std::string(what) + ": numeric and string operands mixed");
}

}  // namespace

Expr col(std::string name) {
  ExprNode n;
  n.kind = ExprNode::Kind::ColumnRef;
  n.name = std::move(name);
  return make(std::move(n));
}

Expr lit(int64_t v) {
  ExprNode n;
  n.kind = ExprNode::Kind::LiteralI64;
  n.i64 = v;
  return make(std::move(n));
}

Expr lit(double v) {
  ExprNode n;
  n.kind = ExprNode::Kind::LiteralF64;
  n.f64 = v;
  return make(std::move(n));
}

Expr lit(std::string_view v) {
  ExprNode n;
  n.kind = ExprNode::Kind::LiteralStr;
  n.str = std::string(v);
  return make(std::move(n));
}

Expr lit_date_days(int64_t days) {
  ExprNode n;
  n.kind = ExprNode::Kind::LiteralDate;
  n.i64 = days;
  return make(std::move(n));
}

Expr lit_date(std::string_view ymd) {
  auto d = try_parse_date(ymd);
  if (!d) throw ExprError("malformed date literal: '" + std::string(ymd) + "'");
  return lit_date_days(*d);
}

Expr cmp_expr(CmpOp op, Expr lhs, Expr rhs) {
  check_literal_mix(lhs, rhs, "compare");
  ExprNode n;
  n.kind = ExprNode::Kind::Compare;
  n.cmp = op;
  n.children = {std::move(lhs), std::move(rhs)};
  return make(std::move(n));
}

Expr eq(Expr a, Expr b) { return cmp_expr(CmpOp::Eq, std::move(a), std::move(b)); }
Expr ne(Expr a, Expr b) { return cmp_expr(CmpOp::Ne, std::move(a), std::move(b)); }
Expr lt(Expr a, Expr b) { return cmp_expr(CmpOp::Lt, std::move(a), std::move(b)); }
Expr le(Expr a, Expr b) { return cmp_expr(CmpOp::Le, std::move(a), std::move(b)); }
Expr gt(Expr a, Expr b) { return cmp_expr(CmpOp::Gt, std::move(a), std::move(b)); }
Expr ge(Expr a, Expr b) { return cmp_expr(CmpOp::Ge, std::move(a), std::move(b)); }

namespace {
Expr logic_expr(LogicOp op, std::vector<Expr> children) {
  for (const auto& c : children)
    if (!c) throw ExprError("logic: null operand");
  ExprNode n;
  n.kind = ExprNode::Kind::Logic;
  n.logic = op;
  n.children = std::move(children);
  return make(std::move(n));
}
}  // namespace

Expr logic_and(Expr a, Expr b) {
  return logic_expr(LogicOp::And, {std::move(a), std::move(b)});
}
Expr logic_or(Expr a, Expr b) {
  return logic_expr(LogicOp::Or, {std::move(a), std::move(b)});
}
Expr logic_not(Expr a) { return logic_expr(LogicOp::Not, {std::move(a)}); }

Expr arith_expr(ArithOp op, Expr lhs, Expr rhs) {
  check_literal_mix(lhs, rhs, "arith");
  if ((lhs && is_string_literal(*lhs)) || (rhs && is_string_literal(*rhs)))
    throw ExprError("arith: string operand");
  ExprNode n;
  n.kind = ExprNode::Kind::Arith;
  n.arith = op;
  n.children = {std::move(lhs), std::move(rhs)};
  return make(std::move(n));
}

Expr add(Expr a, Expr b) { return arith_expr(ArithOp::Add, std::move(a), std::move(b)); }
Expr sub(Expr a, Expr b) { return arith_expr(ArithOp::Sub, std::move(a), std::move(b)); }
Expr mul(Expr a, Expr b) { return arith_expr(ArithOp::Mul, std::move(a), std::move(b)); }
Expr div(Expr a, Expr b) { return arith_expr(ArithOp::Div, std::move(a), std::move(b)); }

Expr between(Expr column, Expr lo, Expr hi) {
  if (!column || !lo || !hi) throw ExprError("between: null operand");
  ExprNode n;
  n.kind = ExprNode::Kind::Between;
  n.children = {std::move(column), std::move(lo), std::move(hi)};
  return make(std::move(n));
}

Expr in_set(Expr column, std::vector<int64_t> values) {
  if (!column) throw ExprError("in_set: null operand");
  ExprNode n;
  n.kind = ExprNode::Kind::InSet;
  n.children = {std::move(column)};
  n.i64_set = std::move(values);
  n.set_is_string = false;
  return make(std::move(n));
}

Expr in_set(Expr column, std::vector<std::string> values) {
  if (!column) throw ExprError("in_set: null operand");
  ExprNode n;
  n.kind = ExprNode::Kind::InSet;
  n.children = {std::move(column)};
  n.str_set = std::move(values);
  n.set_is_string = true;
  return make(std::move(n));
}

namespace {
Expr string_op(ExprNode::Kind kind, Expr column, std::string literal) {
  if (!column) throw ExprError("string op: null operand");
  ExprNode n;
  n.kind = kind;
  n.children = {std::move(column)};
  n.str = std::move(literal);
  return make(std::move(n));
}
}  // namespace

Expr like(Expr column, std::string pattern) {
  return string_op(ExprNode::Kind::Like, std::move(column), std::move(pattern));
}
Expr starts_with(Expr column, std::string prefix) {
  return string_op(ExprNode::Kind::StartsWith, std::move(column), std::move(prefix));
}
Expr ends_with(Expr column, std::string suffix) {
  return string_op(ExprNode::Kind::EndsWith, std::move(column), std::move(suffix));
}
Expr contains(Expr column, std::string needle) {
  return string_op(ExprNode::Kind::Contains, std::move(column), std::move(needle));
}

/* ---------------- LIKE ---------------- */

bool like_match(std::string_view s, std::string_view p) {
  // Two-pointer with backtracking to the last '%'.
  size_t si = 0, pi = 0;
  size_t star = std::string_view::npos, mark = 0;
  while (si < s.size()) {
    if (pi < p.size() && (p[pi] == '_' || p[pi] == s[si])) {
      ++si;
      ++pi;
    } else if (pi < p.size() && p[pi] == '%') {
      star = pi++;
      mark = si;
    } else if (star != std::string_view::npos) {
      pi = star + 1;
      si = ++mark;
    } else {
      return false;
    }
  }
  while (pi < p.size() && p[pi] == '%') ++pi;
  return pi == p.size();
}

/* ---------------- binding ---------------- */

namespace {

enum class VC : uint8_t { Bool, I64, F64, Str };

struct Batch {
  VC cls{};
  std::vector<uint8_t> bools;
  std::vector<int64_t> i64s;
  std::vector<double> f64s;
  std::vector<std::string_view> strs;
};

struct BNode {
  VC cls{};
  virtual ~BNode() = default;
  // Evaluates logical rows [begin, end) of f into out.
  virtual void eval(const Frame& f, size_t begin, size_t end, Batch& out) const = 0;
};
using BPtr = std::unique_ptr<BNode>;

struct BColNum : BNode {
  ColumnView view;
  void eval(const Frame& f, size_t begin, size_t end, Batch& out) const override {
    (void)f;
    size_t len = end - begin;
    if (cls == VC::I64) {
      out.i64s.resize(len);
      for (size_t i = 0; i < len; ++i) out.i64s[i] = view.i64(begin + i);
    } else {
      out.f64s.resize(len);
      for (size_t i = 0; i < len; ++i) out.f64s[i] = view.f64(begin + i);
    }
    out.cls = cls;
  }
};

struct BColStr : BNode {
  ColumnView view;
  void eval(const Frame&, size_t begin, size_t end, Batch& out) const override {
    size_t len = end - begin;
    out.strs.resize(len);
    for (size_t i = 0; i < len; ++i) out.strs[i] = view.str(begin + i);
    out.cls = VC::Str;
  }
};

struct BConstI64 : BNode {
  int64_t v = 0;
  void eval(const Frame&, size_t begin, size_t end, Batch& out) const override {
    out.i64s.assign(end - begin, v);
    out.cls = VC::I64;
  }
};

struct BConstF64 : BNode {
  double v = 0;
  void eval(const Frame&, size_t begin, size_t end, Batch& out) const override {
    out.f64s.assign(end - begin, v);
    out.cls = VC::F64;
  }
};

struct BConstStr : BNode {
  std::string v;
  void eval(const Frame&, size_t begin, size_t end, Batch& out) const override {
    out.strs.assign(end - begin, std::string_view(v));
    out.cls = VC::Str;
  }
};

struct BConstBool : BNode {
  bool v = false;
  void eval(const Frame&, size_t begin, size_t end, Batch& out) const override {
    out.bools.assign(end - begin, v ? 1 : 0);
    out.cls = VC::Bool;
  }
};

// Numeric child widened to f64 on demand.
void as_f64(const Batch& in, std::vector<double>& out) {
  if (in.cls == VC::F64) {
    out = in.f64s;
    return;
  }
  out.resize(in.i64s.size());
  for (size_t i = 0; i < in.i64s.size(); ++i) out[i] = double(in.i64s[i]);
}

template <typename T, typename F>
void cmp_loop(const std::vector<T>& a, const std::vector<T>& b,
              std::vector<uint8_t>& out, F f) {
  out.resize(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = f(a[i], b[i]) ? 1 : 0;
}

template <typename T>
void dispatch_cmp(CmpOp op, const std::vector<T>& a, const std::vector<T>& b,
                  std::vector<uint8_t>& out) {
  switch (op) {
    case CmpOp::Eq: cmp_loop(a, b, out, std::equal_to<T>{}); break;
    case CmpOp::Ne: cmp_loop(a, b, out, std::not_equal_to<T>{}); break;
    case CmpOp::Lt: cmp_loop(a, b, out, std::less<T>{}); break;
    case CmpOp::Le: cmp_loop(a, b, out, std::less_equal<T>{}); break;
    case CmpOp::Gt: cmp_loop(a, b, out, std::greater<T>{}); break;
    case CmpOp::Ge: cmp_loop(a, b, out, std::greater_equal<T>{}); break;
  }
}

struct BCompare : BNode {
  CmpOp op{};
  BPtr lhs, rhs;
  VC operand_cls{};  // I64, F64 (after promotion) or Str
  void eval(const Frame& f, size_t begin, size_t end, Batch& out) const override {
    Batch a, b;
    lhs->eval(f, begin, end, a);
    rhs->eval(f, begin, end, b);
    if (operand_cls == VC::Str) {
      dispatch_cmp(op, a.strs, b.strs, out.bools);
    } else if (operand_cls == VC::I64) {
      dispatch_cmp(op, a.i64s, b.i64s, out.bools);
    } else {
      std::vector<double> x, y;
      as_f64(a, x);
      as_f64(b, y);
      dispatch_cmp(op, x, y, out.bools);
    }
    out.cls = VC::Bool;
  }
};

// DictCode column against a string literal present in the dictionary:
// equality runs on codes, no decode.
struct BDictCmpCode : BNode {
  ColumnView view;
  int64_t code = 0;
  bool want_equal = true;
  void eval(const Frame&, size_t begin, size_t end, Batch& out) const override {
    size_t len = end - begin;
    out.bools.resize(len);
    for (size_t i = 0; i < len; ++i) {
      bool hit = view.i64(begin + i) == code;
      out.bools[i] = (hit == want_equal) ? 1 : 0;
    }
    out.cls = VC::Bool;
  }
};

// Any per-value predicate over a DictCode column, precomputed per code.
struct BDictTable : BNode {
  ColumnView view;
  std::vector<uint8_t> table;
  void eval(const Frame&, size_t begin, size_t end, Batch& out) const override {
    size_t len = end - begin;
    out.bools.resize(len);
    for (size_t i = 0; i < len; ++i)
      out.bools[i] = table[size_t(view.i64(begin + i))];
    out.cls = VC::Bool;
  }
};

struct BLogic : BNode {
  LogicOp op{};
  BPtr lhs, rhs;  // rhs null for Not
  void eval(const Frame& f, size_t begin, size_t end, Batch& out) const override {
    Batch a;
    lhs->eval(f, begin, end, a);
    if (op == LogicOp::Not) {
      out.bools.resize(a.bools.size());
      for (size_t i = 0; i < a.bools.size(); ++i) out.bools[i] = a.bools[i] ? 0 : 1;
    } else {
      Batch b;
      rhs->eval(f, begin, end, b);
      out.bools.resize(a.bools.size());
      if (op == LogicOp::And)
        for (size_t i = 0; i < a.bools.size(); ++i)
          out.bools[i] = (a.bools[i] && b.bools[i]) ? 1 : 0;
      else
        for (size_t i = 0; i < a.bools.size(); ++i)
          out.bools[i] = (a.bools[i] || b.bools[i]) ? 1 : 0;
    }
    out.cls = VC::Bool;
  }
};

struct BArith : BNode {
  ArithOp op{};
  BPtr lhs, rhs;
  void eval(const Frame& f, size_t begin, size_t end, Batch& out) const override {
    Batch a, b;
    lhs->eval(f, begin, end, a);
    rhs->eval(f, begin, end, b);
    if (cls == VC::I64) {
      // Unsigned intermediate: wraparound instead of undefined behavior.
      out.i64s.resize(a.i64s.size());
      for (size_t i = 0; i < a.i64s.size(); ++i) {
        uint64_t x = uint64_t(a.i64s[i]), y = uint64_t(b.i64s[i]);
        uint64_t r = op == ArithOp::Add ? x + y
                     : op == ArithOp::Sub ? x - y
                                          : x * y;
        out.i64s[i] = int64_t(r);
      }
      out.cls = VC::I64;
    } else {
      std::vector<double> x, y;
      as_f64(a, x);
      as_f64(b, y);
      out.f64s.resize(x.size());
      switch (op) {
        case ArithOp::Add:
          for (size_t i = 0; i < x.size(); ++i) out.f64s[i] = x[i] + y[i];
          break;
        case ArithOp::Sub:
          for (size_t i = 0; i < x.size(); ++i) out.f64s[i] = x[i] - y[i];
          break;
        case ArithOp::Mul:
          for (size_t i = 0; i < x.size(); ++i) out.f64s[i] = x[i] * y[i];
          break;
        case ArithOp::Div:
          for (size_t i = 0; i < x.size(); ++i) out.f64s[i] = x[i] / y[i];
          break;
      }
      out.cls = VC::F64;
    }
  }
};

struct BInSetI64 : BNode {
  BPtr child;
  std::unordered_set<int64_t> set;
  void eval(const Frame& f, size_t begin, size_t end, Batch& out) const override {
    Batch a;
    child->eval(f, begin, end, a);
    out.bools.resize(a.i64s.size());
    for (size_t i = 0; i < a.i64s.size(); ++i)
      out.bools[i] = set.contains(a.i64s[i]) ? 1 : 0;
    out.cls = VC::Bool;
  }
};

struct BInSetStr : BNode {
  BPtr child;
  std::unordered_set<std::string, StringHash, std::equal_to<>> set;
  void eval(const Frame& f, size_t begin, size_t end, Batch& out) const override {
    Batch a;
    child->eval(f, begin, end, a);
    out.bools.resize(a.strs.size());
    for (size_t i = 0; i < a.strs.size(); ++i)
      out.bools[i] = set.contains(a.strs[i]) ? 1 : 0;
    out.cls = VC::Bool;
  }
};

struct BStringPred : BNode {
  ExprNode::Kind kind{};
  BPtr child;
  std::string literal;
  void eval(const Frame& f, size_t begin, size_t end, Batch& out) const override {
    Batch a;
    child->eval(f, begin, end, a);
    out.bools.resize(a.strs.size());
    for (size_t i = 0; i < a.strs.size(); ++i) {
      std::string_view s = a.strs[i];
      bool hit = false;
      switch (kind) {
        case ExprNode::Kind::Like: hit = like_match(s, literal); break;
        case ExprNode::Kind::StartsWith: hit = s.starts_with(literal); break;
        case ExprNode::Kind::EndsWith: hit = s.ends_with(literal); break;
        default: hit = s.find(literal) != std::string_view::npos; break;
      }
      out.bools[i] = hit ? 1 : 0;
    }
    out.cls = VC::Bool;
  }
};

bool numeric(VC c) { return c == VC::I64 || c == VC::F64; }

// A bare DictCode column reference, eligible for code-level shortcuts.
const ExprNode* dict_column_ref(const Frame& f, const ExprNode& e) {
  if (e.kind != ExprNode::Kind::ColumnRef) return nullptr;
  size_t pos = f.column_pos(e.name);
  return f.metas()[pos].dtype == LogicalDtype::DictCode ? &e : nullptr;
}

BPtr bind(const Frame& f, const ExprNode& e);

BPtr bind_dict_table(const Frame& f, const std::string& name,
                     const std::function<bool(std::string_view)>& pred) {
  auto node = std::make_unique<BDictTable>();
  node->cls = VC::Bool;
  node->view = f.column(name);
  const Dictionary& d = *node->view.dict;
  node->table.resize(d.size());
  for (size_t c = 0; c < d.size(); ++c) node->table[c] = pred(d.values[c]) ? 1 : 0;
  return node;
}

BPtr bind_compare(const Frame& f, const ExprNode& e) {
  const ExprNode& le = *e.children[0];
  const ExprNode& re = *e.children[1];

  // Code-level shortcut for dict column vs string literal.
  const ExprNode* dcol = dict_column_ref(f, le);
  const ExprNode* slit = re.kind == ExprNode::Kind::LiteralStr ? &re : nullptr;
  CmpOp op = e.cmp;
  if (!dcol || !slit) {
    dcol = dict_column_ref(f, re);
    slit = le.kind == ExprNode::Kind::LiteralStr ? &le : nullptr;
    if (dcol && slit) {  // literal on the left: mirror the operator
      switch (e.cmp) {
        case CmpOp::Lt: op = CmpOp::Gt; break;
        case CmpOp::Le: op = CmpOp::Ge; break;
        case CmpOp::Gt: op = CmpOp::Lt; break;
        case CmpOp::Ge: op = CmpOp::Le; break;
        default: break;
      }
    }
  }
  if (dcol && slit) {
    ColumnView view = f.column(dcol->name);
    if (op == CmpOp::Eq || op == CmpOp::Ne) {
      auto code = view.dict->code_of(slit->str);
      if (!code) {  // absent literal: nothing matches "=", everything "!="
        auto c = std::make_unique<BConstBool>();
        c->cls = VC::Bool;
        c->v = (op == CmpOp::Ne);
        return c;
      }
      auto node = std::make_unique<BDictCmpCode>();
      node->cls = VC::Bool;
      node->view = view;
      node->code = *code;
      node->want_equal = (op == CmpOp::Eq);
      return node;
    }
    std::string literal = slit->str;
    return bind_dict_table(f, dcol->name, [op, literal](std::string_view v) {
      int c = v.compare(literal);
      switch (op) {
        case CmpOp::Lt: return c < 0;
        case CmpOp::Le: return c <= 0;
        case CmpOp::Gt: return c > 0;
        default: return c >= 0;
      }
    });
  }

  auto node = std::make_unique<BCompare>();
  node->cls = VC::Bool;
  node->op = e.cmp;
  node->lhs = bind(f, le);
  node->rhs = bind(f, re);
  VC a = node->lhs->cls, b = node->rhs->cls;
  if (a == VC::Str && b == VC::Str) {
    node->operand_cls = VC::Str;
  } else if (numeric(a) && numeric(b)) {
    node->operand_cls = (a == VC::F64 || b == VC::F64) ? VC::F64 : VC::I64;
  } else {
    throw ExprError("compare: operands must both be numeric or both string");
  }
  return node;
}

BPtr bind(const Frame& f, const ExprNode& e) {
  using K = ExprNode::Kind;
  switch (e.kind) {
    case K::ColumnRef: {
      ColumnView view = f.column(e.name);  // NameError on unknown name
      switch (view.dtype()) {
        case LogicalDtype::Int64:
        case LogicalDtype::Date: {
          auto n = std::make_unique<BColNum>();
          n->cls = VC::I64;
          n->view = view;
          return n;
        }
        case LogicalDtype::Float64: {
          auto n = std::make_unique<BColNum>();
          n->cls = VC::F64;
          n->view = view;
          return n;
        }
        default: {
          auto n = std::make_unique<BColStr>();
          n->cls = VC::Str;
          n->view = view;
          return n;
        }
      }
    }
    case K::LiteralI64:
    case K::LiteralDate: {
      auto n = std::make_unique<BConstI64>();
      n->cls = VC::I64;
      n->v = e.i64;
      return n;
    }
    case K::LiteralF64: {
      auto n = std::make_unique<BConstF64>();
      n->cls = VC::F64;
      n->v = e.f64;
      return n;
    }
    case K::LiteralStr: {
      auto n = std::make_unique<BConstStr>();
      n->cls = VC::Str;
      n->v = e.str;
      return n;
    }
    case K::Compare:
      return bind_compare(f, e);
    case K::Logic: {
      auto n = std::make_unique<BLogic>();
      n->cls = VC::Bool;
      n->op = e.logic;
      n->lhs = bind(f, *e.children[0]);
      if (n->lhs->cls != VC::Bool) throw ExprError("logic: operand is not boolean");
      if (e.logic != LogicOp::Not) {
        n->rhs = bind(f, *e.children[1]);
        if (n->rhs->cls != VC::Bool)
          throw ExprError("logic: operand is not boolean");
      }
      return n;
    }
    case K::Arith: {
      auto n = std::make_unique<BArith>();
      n->op = e.arith;
      n->lhs = bind(f, *e.children[0]);
      n->rhs = bind(f, *e.children[1]);
      if (!numeric(n->lhs->cls) || !numeric(n->rhs->cls))
        throw ExprError("arith: operands must be numeric");
      // Int64 and Date stay integer unless a Float64 operand or a division
      // promotes the node.
      bool f64 = n->lhs->cls == VC::F64 || n->rhs->cls == VC::F64 ||
                 e.arith == ArithOp::Div;
      n->cls = f64 ? VC::F64 : VC::I64;
      return n;
    }
    case K::Between: {
      // col between lo and hi  ==  col >= lo and col <= hi (inclusive ends).
      auto ge_part = std::make_unique<BCompare>();
      auto le_part = std::make_unique<BCompare>();
      ge_part->cls = le_part->cls = VC::Bool;
      ge_part->op = CmpOp::Ge;
      le_part->op = CmpOp::Le;
      ge_part->lhs = bind(f, *e.children[0]);
      ge_part->rhs = bind(f, *e.children[1]);
      le_part->lhs = bind(f, *e.children[0]);
      le_part->rhs = bind(f, *e.children[2]);
      for (auto* part : {ge_part.get(), le_part.get()}) {
        if (!numeric(part->lhs->cls) || !numeric(part->rhs->cls))
          throw ExprError("between: all operands must be numeric");
        part->operand_cls = (part->lhs->cls == VC::F64 || part->rhs->cls == VC::F64)
                                ? VC::F64
                                : VC::I64;
      }
      auto n = std::make_unique<BLogic>();
      n->cls = VC::Bool;
      n->op = LogicOp::And;
      n->lhs = std::move(ge_part);
      n->rhs = std::move(le_part);
      return n;
    }
    case K::InSet: {
      const ExprNode& ce = *e.children[0];
      if (e.set_is_string) {
        if (dict_column_ref(f, ce)) {
          std::unordered_set<std::string, StringHash, std::equal_to<>> set(
              e.str_set.begin(), e.str_set.end());
          return bind_dict_table(f, ce.name, [set = std::move(set)](
                                                 std::string_view v) {
            return set.contains(v);
          });
        }
        auto n = std::make_unique<BInSetStr>();
        n->cls = VC::Bool;
        n->child = bind(f, ce);
        if (n->child->cls != VC::Str)
          throw ExprError("in_set: string set against non-string column");
        n->set.insert(e.str_set.begin(), e.str_set.end());
        return n;
      }
      auto n = std::make_unique<BInSetI64>();
      n->cls = VC::Bool;
      n->child = bind(f, ce);
      if (n->child->cls != VC::I64)
        throw ExprError("in_set: integer set against non-integer column");
      n->set.insert(e.i64_set.begin(), e.i64_set.end());
      return n;
    }
    case K::Like:
    case K::StartsWith:
    case K::EndsWith:
    case K::Contains: {
      const ExprNode& ce = *e.children[0];
      if (dict_column_ref(f, ce)) {
        ExprNode::Kind kind = e.kind;
        std::string literal = e.str;
        return bind_dict_table(f, ce.name,
                               [kind, literal](std::string_view v) {
                                 switch (kind) {
                                   case ExprNode::Kind::Like:
                                     return like_match(v, literal);
                                   case ExprNode::Kind::StartsWith:
                                     return v.starts_with(literal);
                                   case ExprNode::Kind::EndsWith:
                                     return v.ends_with(literal);
                                   default:
                                     return v.find(literal) !=
                                            std::string_view::npos;
                                 }
                               });
      }
      auto n = std::make_unique<BStringPred>();
      n->cls = VC::Bool;
      n->kind = e.kind;
      n->child = bind(f, ce);
      if (n->child->cls != VC::Str)
        throw ExprError("string predicate on non-string operand");
      n->literal = e.str;
      return n;
    }
  }
  throw ExprError("unknown expression node");
}

}  // namespace

/* ---------------- evaluation ---------------- */

std::vector<RowId> eval_mask(const Frame& f, const Expr& e, EvalOptions opt) {
  if (!e) throw ExprError("null expression");
  BPtr root = bind(f, *e);
  if (root->cls != VC::Bool) throw ExprError("filter expression is not boolean");

  const size_t n = f.n_rows();
  const size_t chunks = chunk_count(n, opt.chunk_size);
  std::vector<std::vector<RowId>> parts(chunks);
  for_each_chunk(n, opt.chunk_size, [&](size_t c, size_t begin, size_t end) {
    Batch out;
    root->eval(f, begin, end, out);
    auto& ids = parts[c];
    for (size_t i = begin; i < end; ++i)
      if (out.bools[i - begin]) ids.push_back(f.physical_row(i));
  });

  std::vector<RowId> mask;  // per-chunk results merged in chunk order
  size_t total = 0;
  for (const auto& p : parts) total += p.size();
  mask.reserve(total);
  for (const auto& p : parts) mask.insert(mask.end(), p.begin(), p.end());
  return mask;
}

Frame apply_filter(const Frame& f, const Expr& e, EvalOptions opt) {
  return f.with_row_index(eval_mask(f, e, opt));
}

Frame eval_compute(const Frame& f, const Expr& e, const std::string& out_name,
                   EvalOptions opt) {
  if (!e) throw ExprError("null expression");
  // Appending a physical column under a narrowed row indexer would desync
  // siblings; work on a materialized frame instead.
  Frame base = f.materialize();
  BPtr root = bind(base, *e);
  if (root->cls != VC::I64 && root->cls != VC::F64)
    throw ExprError("compute expression must yield a numeric value");

  const size_t n = base.n_rows();
  std::vector<Cell64> cells(n);
  for_each_chunk(n, opt.chunk_size, [&](size_t, size_t begin, size_t end) {
    Batch out;
    root->eval(base, begin, end, out);
    if (root->cls == VC::I64)
      for (size_t i = begin; i < end; ++i)
        cells[i] = std::bit_cast<Cell64>(out.i64s[i - begin]);
    else
      for (size_t i = begin; i < end; ++i)
        cells[i] = std::bit_cast<Cell64>(out.f64s[i - begin]);
  });

  LogicalDtype dtype =
      root->cls == VC::I64 ? LogicalDtype::Int64 : LogicalDtype::Float64;
  return base.append_block_column(out_name, dtype, std::move(cells));
}

}  // namespace cardframe
