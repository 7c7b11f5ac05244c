// Python bindings for the cardframe engine: frame construction/inspection,
// expression building with operator overloads, filter/compute/groupby/join,
// MFB and CSV I/O, the sample-data generator, and the query catalog.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdio>
#include <variant>

#include "cardframe/csv.hpp"
#include "cardframe/date.hpp"
#include "cardframe/encoding.hpp"
#include "cardframe/expr.hpp"
#include "cardframe/groupby.hpp"
#include "cardframe/join.hpp"
#include "cardframe/mfb.hpp"
#include "cardframe/oracle.hpp"
#include "cardframe/parallel.hpp"
#include "cardframe/queries.hpp"
#include "cardframe/tpch_gen.hpp"

namespace py = pybind11;
using namespace cardframe;

namespace {

using PyCell = std::variant<int64_t, double, std::string>;

// Frames cross the boundary as {name: list-of-values} with dates rendered as
// "yyyy-mm-dd" strings; dtype introspection goes through Frame.dtypes().
py::list column_values(const Frame& f, size_t pos) {
  ColumnView c = f.column(pos);
  py::list out;
  for (size_t i = 0; i < f.n_rows(); ++i) {
    switch (c.dtype()) {
      case LogicalDtype::Int64: out.append(c.i64(i)); break;
      case LogicalDtype::Float64: out.append(c.f64(i)); break;
      case LogicalDtype::Date: out.append(format_date(c.i64(i))); break;
      default: out.append(std::string(c.str(i))); break;
    }
  }
  return out;
}

py::dict frame_to_dict(const Frame& f) {
  py::dict out;
  for (size_t j = 0; j < f.n_cols(); ++j)
    out[py::str(f.names()[j])] = column_values(f, j);
  return out;
}

const char* py_dtype_name(LogicalDtype d) {
  switch (d) {
    case LogicalDtype::Int64: return "i64";
    case LogicalDtype::Float64: return "f64";
    case LogicalDtype::Date: return "date";
    case LogicalDtype::DictCode: return "dict";
    case LogicalDtype::RawString: return "str";
  }
  return "?";
}

// Columns arrive as Python lists; the first non-ambiguous classification
// wins: all ints -> Int64, numbers -> Float64, strings that all parse as
// dates -> Date, otherwise strings by cardinality.
Frame frame_from_columns(const py::dict& columns, double threshold) {
  size_t n = 0;
  bool first = true;
  for (auto item : columns) {
    size_t len = py::len(item.second);
    if (first) {
      n = len;
      first = false;
    } else if (len != n) {
      throw Error("column length mismatch: " +
                  py::cast<std::string>(item.first));
    }
  }
  FrameBuilder b(n);
  for (auto item : columns) {
    std::string name = py::cast<std::string>(item.first);
    py::sequence seq = py::cast<py::sequence>(item.second);
    bool all_int = true, all_num = true, all_str = true;
    for (auto v : seq) {
      if (py::isinstance<py::bool_>(v)) { all_int = all_num = all_str = false; break; }
      if (py::isinstance<py::int_>(v)) { all_str = false; continue; }
      if (py::isinstance<py::float_>(v)) { all_int = false; all_str = false; continue; }
      if (py::isinstance<py::str>(v)) { all_int = all_num = false; continue; }
      all_int = all_num = all_str = false;
      break;
    }
    if (n == 0) all_int = true;  // empty column defaults to Int64
    if (all_int) {
      std::vector<int64_t> v;
      v.reserve(n);
      for (auto x : seq) v.push_back(py::cast<int64_t>(x));
      b.add_i64(name, std::move(v));
    } else if (all_num) {
      std::vector<double> v;
      v.reserve(n);
      for (auto x : seq) v.push_back(py::cast<double>(x));
      b.add_f64(name, std::move(v));
    } else if (all_str) {
      std::vector<std::string> v;
      v.reserve(n);
      bool all_dates = true;
      for (auto x : seq) {
        v.push_back(py::cast<std::string>(x));
        if (all_dates && !try_parse_date(v.back())) all_dates = false;
      }
      if (all_dates && n > 0) {
        std::vector<int64_t> days;
        days.reserve(n);
        for (const auto& s : v) days.push_back(parse_date(s));
        b.add_date(name, std::move(days));
      } else {
        add_string_auto(b, name, v, threshold);
      }
    } else {
      throw Error("column " + name +
                  " must be all ints, all numbers, or all strings");
    }
  }
  return b.build();
}

std::vector<SortKey> sort_keys_from(const py::object& keys) {
  std::vector<SortKey> out;
  for (auto item : py::cast<py::sequence>(keys)) {
    if (py::isinstance<py::str>(item)) {
      out.push_back({py::cast<std::string>(item), true});
    } else {
      auto pair = py::cast<py::sequence>(item);
      out.push_back(
          {py::cast<std::string>(pair[0]), py::cast<bool>(pair[1])});
    }
  }
  return out;
}

AggFn agg_fn_from(const std::string& name) {
  if (name == "sum") return AggFn::Sum;
  if (name == "count") return AggFn::Count;
  if (name == "mean") return AggFn::Mean;
  if (name == "min") return AggFn::Min;
  if (name == "max") return AggFn::Max;
  if (name == "count_distinct") return AggFn::CountDistinct;
  throw Error("unknown aggregate: " + name +
              " (expected sum, count, mean, min, max, count_distinct)");
}

GroupStrategy groupby_from(const std::string& name) {
  if (name == "transposed") return GroupStrategy::Transposed;
  if (name == "incremental") return GroupStrategy::Incremental;
  throw Error("unknown groupby strategy: " + name);
}

JoinAlgo join_from(const std::string& name) {
  if (name == "hash") return JoinAlgo::Hash;
  if (name == "sortmerge") return JoinAlgo::SortMerge;
  throw Error("unknown join algorithm: " + name);
}

Expr expr_from_py(const py::object& v) {
  if (py::isinstance<ExprNode>(v)) return py::cast<Expr>(v);
  if (py::isinstance<py::bool_>(v)) throw Error("bool literals not supported");
  if (py::isinstance<py::int_>(v)) return lit(py::cast<int64_t>(v));
  if (py::isinstance<py::float_>(v)) return lit(py::cast<double>(v));
  if (py::isinstance<py::str>(v)) {
    std::string s = py::cast<std::string>(v);
    if (try_parse_date(s)) return lit_date(s);
    return lit(s);
  }
  throw Error("cannot convert value to an expression literal");
}

AggSpec agg_spec_from(const py::object& aggs) {
  // [(column, fn, out_name), ...]
  AggSpec spec;
  for (auto item : py::cast<py::sequence>(aggs)) {
    auto t = py::cast<py::sequence>(item);
    spec.push_back({py::cast<std::string>(t[0]),
                    agg_fn_from(py::cast<std::string>(t[1])),
                    py::cast<std::string>(t[2])});
  }
  return spec;
}

JoinKeys join_keys_from(const py::object& keys) {
  JoinKeys out;
  for (auto item : py::cast<py::sequence>(keys)) {
    if (py::isinstance<py::str>(item)) {
      std::string k = py::cast<std::string>(item);
      out.emplace_back(k, k);
    } else {
      auto pair = py::cast<py::sequence>(item);
      out.emplace_back(py::cast<std::string>(pair[0]),
                       py::cast<std::string>(pair[1]));
    }
  }
  return out;
}

std::string hex64_py(uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)v);
  return buf;
}

}  // namespace

PYBIND11_MODULE(cardframe, m) {
  m.doc() = "cardinality-aware columnar dataframe engine";

  // Translators run most-recent-first, so the base class goes first and the
  // specific types after it; all of them inherit from EngineError in Python.
  auto base_exc = py::register_exception<Error>(m, "EngineError");
  py::register_exception<NameError>(m, "NameError", base_exc.ptr());
  py::register_exception<FormatError>(m, "FormatError", base_exc.ptr());
  py::register_exception<ParseError>(m, "ParseError", base_exc.ptr());
  py::register_exception<ExprError>(m, "ExprError", base_exc.ptr());
  py::register_exception<JoinError>(m, "JoinError", base_exc.ptr());

  py::class_<ExprNode, std::shared_ptr<ExprNode>>(m, "Expr")
      .def("__eq__", [](const Expr& a, const py::object& b) { return eq(a, expr_from_py(b)); })
      .def("__ne__", [](const Expr& a, const py::object& b) { return ne(a, expr_from_py(b)); })
      .def("__lt__", [](const Expr& a, const py::object& b) { return lt(a, expr_from_py(b)); })
      .def("__le__", [](const Expr& a, const py::object& b) { return le(a, expr_from_py(b)); })
      .def("__gt__", [](const Expr& a, const py::object& b) { return gt(a, expr_from_py(b)); })
      .def("__ge__", [](const Expr& a, const py::object& b) { return ge(a, expr_from_py(b)); })
      .def("__add__", [](const Expr& a, const py::object& b) { return add(a, expr_from_py(b)); })
      .def("__radd__", [](const Expr& a, const py::object& b) { return add(expr_from_py(b), a); })
      .def("__sub__", [](const Expr& a, const py::object& b) { return sub(a, expr_from_py(b)); })
      .def("__rsub__", [](const Expr& a, const py::object& b) { return sub(expr_from_py(b), a); })
      .def("__mul__", [](const Expr& a, const py::object& b) { return mul(a, expr_from_py(b)); })
      .def("__rmul__", [](const Expr& a, const py::object& b) { return mul(expr_from_py(b), a); })
      .def("__truediv__", [](const Expr& a, const py::object& b) { return div(a, expr_from_py(b)); })
      .def("__rtruediv__", [](const Expr& a, const py::object& b) { return div(expr_from_py(b), a); })
      .def("__and__", [](const Expr& a, const Expr& b) { return logic_and(a, b); })
      .def("__or__", [](const Expr& a, const Expr& b) { return logic_or(a, b); })
      .def("__invert__", [](const Expr& a) { return logic_not(a); })
      .def("between", [](const Expr& a, const py::object& lo, const py::object& hi) {
        return between(a, expr_from_py(lo), expr_from_py(hi));
      })
      .def("isin", [](const Expr& a, const py::object& values) {
        auto seq = py::cast<py::sequence>(values);
        bool strings = seq.size() > 0 && py::isinstance<py::str>(seq[0]);
        if (strings) {
          std::vector<std::string> v;
          for (auto x : seq) v.push_back(py::cast<std::string>(x));
          return in_set(a, std::move(v));
        }
        std::vector<int64_t> v;
        for (auto x : seq) v.push_back(py::cast<int64_t>(x));
        return in_set(a, std::move(v));
      })
      .def("like", [](const Expr& a, const std::string& p) { return like(a, p); })
      .def("startswith", [](const Expr& a, const std::string& p) { return starts_with(a, p); })
      .def("endswith", [](const Expr& a, const std::string& p) { return ends_with(a, p); })
      .def("contains", [](const Expr& a, const std::string& p) { return contains(a, p); });

  m.def("col", &col, py::arg("name"));
  m.def("lit", [](const py::object& v) { return expr_from_py(v); });
  m.def("lit_date", [](const std::string& ymd) { return lit_date(ymd); });

  py::class_<Frame>(m, "Frame")
      .def(py::init([](const py::dict& columns, double threshold) {
             return frame_from_columns(columns, threshold);
           }),
           py::arg("columns"), py::arg("threshold") = 0.5)
      .def_property_readonly("n_rows", [](const Frame& f) { return f.n_rows(); })
      .def_property_readonly("n_cols", [](const Frame& f) { return f.n_cols(); })
      .def_property_readonly("names", [](const Frame& f) { return f.names(); })
      .def("dtypes",
           [](const Frame& f) {
             py::dict out;
             for (size_t j = 0; j < f.n_cols(); ++j)
               out[py::str(f.names()[j])] =
                   py_dtype_name(f.metas()[j].dtype);
             return out;
           })
      .def("to_dict", &frame_to_dict)
      .def("column", [](const Frame& f, const std::string& name) {
        return column_values(f, f.column_pos(name));
      })
      .def("select", [](const Frame& f, const std::vector<std::string>& names) {
        return f.select_columns(names);
      })
      .def("rename",
           [](const Frame& f,
              const std::vector<std::pair<std::string, std::string>>& r) {
             return f.renamed(r);
           })
      .def("sort",
           [](const Frame& f, const py::object& keys) {
             return f.sort_by(sort_keys_from(keys));
           })
      .def("distinct",
           [](const Frame& f, const std::vector<std::string>& keys) {
             return f.distinct(keys);
           })
      .def("limit", [](const Frame& f, size_t k) { return f.limit(k); })
      .def("filter",
           [](const Frame& f, const Expr& e) { return apply_filter(f, e); })
      .def("compute",
           [](const Frame& f, const Expr& e, const std::string& out_name) {
             return eval_compute(f, e, out_name);
           })
      .def("groupby",
           [](const Frame& f, const std::vector<std::string>& keys,
              const py::object& aggs, const std::string& strategy) {
             GroupOptions opt;
             opt.strategy = groupby_from(strategy);
             return group_by(f, keys, agg_spec_from(aggs), opt);
           },
           py::arg("keys"), py::arg("aggs"),
           py::arg("strategy") = "transposed")
      .def("join",
           [](const Frame& f, const Frame& right, const py::object& keys,
              const std::string& how, const std::string& algo) {
             JoinOptions opt;
             opt.algo = join_from(algo);
             JoinKeys jk = join_keys_from(keys);
             if (how == "inner") return inner_join(f, right, jk, opt);
             if (how == "semi") return semi_join(f, right, jk, opt);
             if (how == "anti") return anti_join(f, right, jk, opt);
             throw Error("unknown join type: " + how);
           },
           py::arg("right"), py::arg("keys"), py::arg("how") = "inner",
           py::arg("algo") = "hash")
      .def("footprint",
           [](const Frame& f) {
             FootprintReport rep = f.memory_footprint();
             py::dict out;
             py::list cols;
             for (const auto& c : rep.columns) {
               py::dict e;
               e["name"] = c.name;
               e["dtype"] = py_dtype_name(c.dtype);
               e["data_bytes"] = c.data_bytes;
               e["dict_value_bytes"] = c.dict_value_bytes;
               e["dict_index_bytes"] = c.dict_index_bytes;
               e["total"] = c.total();
               cols.append(e);
             }
             out["n_rows"] = rep.n_rows;
             out["columns"] = cols;
             out["total_bytes"] = rep.total_bytes();
             return out;
           })
      .def("content_hash",
           [](const Frame& f) { return hex64_py(content_hash(f)); })
      .def("__repr__", [](const Frame& f) {
        return "<cardframe.Frame " + std::to_string(f.n_rows()) + " rows x " +
               std::to_string(f.n_cols()) + " cols>";
      });

  m.def("read_mfb",
        [](const std::string& path, const py::object& columns) {
          ReadResult r = columns.is_none()
                             ? read_mfb(path)
                             : read_mfb(path,
                                        py::cast<std::vector<std::string>>(columns));
          py::dict stats;
          stats["header_bytes"] = r.stats.header_bytes;
          stats["payload_bytes"] = r.stats.payload_bytes;
          return py::make_tuple(r.frame, stats);
        },
        py::arg("path"), py::arg("columns") = py::none());
  m.def("write_mfb", &write_mfb, py::arg("frame"), py::arg("path"));

  m.def("convert_csv",
        [](const std::string& csv_path, const std::string& schema_path,
           const std::string& out_path) {
          CsvSchema schema = load_schema(schema_path);
          ConvertReport rep = csv_to_mfb(csv_path, schema, out_path);
          py::list cols;
          for (const auto& c : rep.columns) {
            py::dict e;
            e["name"] = c.name;
            e["dtype"] = py_dtype_name(c.dtype);
            e["n_distinct"] = c.n_distinct;
            e["cardinality_ratio"] = c.cardinality_ratio;
            e["data_bytes"] = c.data_bytes;
            e["aux_bytes"] = c.aux_bytes;
            cols.append(e);
          }
          py::dict out;
          out["n_rows"] = rep.n_rows;
          out["columns"] = cols;
          return out;
        },
        py::arg("csv_path"), py::arg("schema_path"), py::arg("out_path"));

  m.def("generate",
        [](double scale, uint64_t seed, const std::string& out_dir) {
          GenManifest man = gen_tpch_mini(scale, seed, out_dir);
          py::list tables;
          for (const auto& t : man.tables) {
            py::dict e;
            e["name"] = t.name;
            e["rows"] = t.rows;
            e["csv"] = t.csv_path;
            e["mfb"] = t.mfb_path;
            e["csv_hash"] = hex64_py(t.csv_hash);
            e["mfb_hash"] = hex64_py(t.mfb_hash);
            tables.append(e);
          }
          py::dict out;
          out["scale"] = man.scale;
          out["seed"] = man.seed;
          out["tables"] = tables;
          return out;
        },
        py::arg("scale"), py::arg("seed"), py::arg("out_dir"));

  m.def("query_ids", [] { return catalog_query_ids(); });
  m.def("run_query",
        [](const std::string& id, const std::string& data_dir, int threads,
           const std::string& groupby, const std::string& join) {
          QueryOptions opt;
          opt.threads = threads;
          opt.groupby = groupby_from(groupby);
          opt.join = join_from(join);
          QueryRun run = run_query(id, data_dir, opt);
          py::dict out;
          out["query"] = run.query;
          out["result"] = run.result;
          out["load_ms"] = run.load_ms;
          out["compute_ms"] = run.compute_ms;
          out["io_header_bytes"] = run.io.header_bytes;
          out["io_payload_bytes"] = run.io.payload_bytes;
          out["content_hash"] = hex64_py(run.content_hash);
          return out;
        },
        py::arg("id"), py::arg("data_dir"), py::arg("threads") = 1,
        py::arg("groupby") = "transposed", py::arg("join") = "hash");

  m.def("set_threads", [](size_t n) { set_thread_budget(n); });
  m.def("format_table",
        [](const Frame& f, size_t max_rows) { return format_table(f, max_rows); },
        py::arg("frame"), py::arg("max_rows") = 100);
}
