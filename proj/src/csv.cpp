#include "cardframe/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

#include "cardframe/date.hpp"
#include "cardframe/encoding.hpp"
#include "cardframe/mfb.hpp"

namespace cardframe {

namespace {

using nlohmann::json;

const char* csv_dtype_name(CsvDtype d) {
  switch (d) {
    case CsvDtype::I64: return "i64";
    case CsvDtype::F64: return "f64";
    case CsvDtype::Date: return "date";
    case CsvDtype::Str: return "str";
  }
  return "?";
}

CsvDtype csv_dtype_from_name(const std::string& s, const std::string& path) {
  if (s == "i64") return CsvDtype::I64;
  if (s == "f64") return CsvDtype::F64;
  if (s == "date") return CsvDtype::Date;
  if (s == "str") return CsvDtype::Str;
  throw FormatError("unknown dtype \"" + s + "\" in schema " + path);
}

void validate_schema(const CsvSchema& s, const std::string& what) {
  if (s.delimiter == '\n') throw FormatError("newline delimiter in " + what);
  std::unordered_set<std::string> seen;
  for (const auto& c : s.columns)
    if (!seen.insert(c.name).second)
      throw FormatError("duplicate column \"" + c.name + "\" in " + what);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) throw Error("read failed: " + path);
  return std::move(buf).str();
}

int64_t parse_i64_field(std::string_view s, size_t line, size_t col) {
  int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ParseError("malformed integer \"" + std::string(s) + "\"", line, col);
  return v;
}

double parse_f64_field(std::string_view s, size_t line, size_t col) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ParseError("malformed float \"" + std::string(s) + "\"", line, col);
  return v;
}

int64_t parse_date_field(std::string_view s, size_t line, size_t col) {
  auto days = try_parse_date(s);
  if (!days)
    throw ParseError("malformed date \"" + std::string(s) + "\"", line, col);
  return *days;
}

// Typed per-column accumulators for one CSV load.
struct ColumnData {
  std::vector<int64_t> i64s;
  std::vector<double> f64s;
  std::vector<std::string> strs;
};

}  // namespace

CsvSchema load_schema(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw FormatError("bad schema JSON " + path + ": " + e.what());
  }
  CsvSchema s;
  try {
    if (j.contains("delimiter")) {
      std::string d = j.at("delimiter").get<std::string>();
      if (d.size() != 1)
        throw FormatError("delimiter must be one byte in " + path);
      s.delimiter = d[0];
    }
    if (j.contains("low_card_threshold"))
      s.low_card_threshold = j.at("low_card_threshold").get<double>();
    for (const auto& c : j.at("columns")) {
      CsvColumnSpec spec;
      spec.name = c.at("name").get<std::string>();
      spec.dtype = csv_dtype_from_name(c.at("dtype").get<std::string>(), path);
      s.columns.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    throw FormatError("bad schema JSON " + path + ": " + e.what());
  }
  validate_schema(s, "schema " + path);
  return s;
}

void save_schema(const CsvSchema& s, const std::string& path) {
  validate_schema(s, "schema " + path);
  json cols = json::array();
  for (const auto& c : s.columns)
    cols.push_back({{"name", c.name}, {"dtype", csv_dtype_name(c.dtype)}});
  json j{{"delimiter", std::string(1, s.delimiter)},
         {"low_card_threshold", s.low_card_threshold},
         {"columns", cols}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed: " + path);
}

// Data rows only (names come from the schema sidecar), '\n' line ends, no
// quoting; one trailing delimiter per line is tolerated.
Frame read_csv(const std::string& csv_path, const CsvSchema& schema) {
  validate_schema(schema, "schema for " + csv_path);
  const std::string text = read_file(csv_path);
  const size_t n_cols = schema.columns.size();
  std::vector<ColumnData> cols(n_cols);

  size_t line_no = 0;
  size_t pos = 0;
  size_t n_rows = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line(text.data() + pos,
                          (eol == std::string::npos ? text.size() : eol) - pos);
    pos = (eol == std::string::npos) ? text.size() : eol + 1;
    ++line_no;
    if (line.empty() && pos >= text.size()) break;  // trailing blank line

    size_t field_start = 0;
    size_t col_idx = 0;
    while (true) {
      size_t d = line.find(schema.delimiter, field_start);
      std::string_view field = line.substr(
          field_start, (d == std::string_view::npos ? line.size() : d) - field_start);
      bool last = (d == std::string_view::npos);
      if (col_idx >= n_cols) {
        if (last && field.empty()) break;  // tolerated trailing delimiter
        throw ParseError("too many fields", line_no, col_idx + 1);
      }
      const CsvColumnSpec& spec = schema.columns[col_idx];
      ColumnData& out = cols[col_idx];
      switch (spec.dtype) {
        case CsvDtype::I64:
          out.i64s.push_back(parse_i64_field(field, line_no, col_idx + 1));
          break;
        case CsvDtype::F64:
          out.f64s.push_back(parse_f64_field(field, line_no, col_idx + 1));
          break;
        case CsvDtype::Date:
          out.i64s.push_back(parse_date_field(field, line_no, col_idx + 1));
          break;
        case CsvDtype::Str:
          out.strs.emplace_back(field);
          break;
      }
      ++col_idx;
      if (last) break;
      field_start = d + 1;
    }
    if (col_idx < n_cols)
      throw ParseError("expected " + std::to_string(n_cols) + " fields, got " +
                           std::to_string(col_idx),
                       line_no, col_idx + 1);
    ++n_rows;
  }

  FrameBuilder b(n_rows);
  for (size_t j = 0; j < n_cols; ++j) {
    const CsvColumnSpec& spec = schema.columns[j];
    switch (spec.dtype) {
      case CsvDtype::I64:
        b.add_i64(spec.name, std::move(cols[j].i64s));
        break;
      case CsvDtype::F64:
        b.add_f64(spec.name, std::move(cols[j].f64s));
        break;
      case CsvDtype::Date:
        b.add_date(spec.name, std::move(cols[j].i64s));
        break;
      case CsvDtype::Str:
        add_string_auto(b, spec.name, cols[j].strs, schema.low_card_threshold);
        break;
    }
  }
  return b.build();
}

ConvertReport csv_to_mfb(const std::string& csv_path, const CsvSchema& schema,
                         const std::string& out_path) {
  Frame f = read_csv(csv_path, schema);
  write_mfb(f, out_path);

  ConvertReport report;
  report.n_rows = f.n_rows();
  const uint64_t n = f.n_rows();
  for (size_t j = 0; j < f.n_cols(); ++j) {
    const ColumnMeta& m = f.metas()[j];
    ConvertColumnReport c;
    c.name = f.names()[j];
    c.dtype = m.dtype;
    if (m.dtype == LogicalDtype::DictCode) {
      const Dictionary& d = *f.storage().dicts[m.dict_id];
      c.n_distinct = d.size();
      c.cardinality_ratio = n ? double(d.size()) / double(n) : 0.0;
      c.data_bytes = n * 8;
      c.aux_bytes = 8 + (d.size() + 1) * 8 + d.value_bytes();
    } else if (m.dtype == LogicalDtype::RawString) {
      auto views = collect_str(f, j);
      auto card = analyze_cardinality(views, schema.low_card_threshold);
      c.n_distinct = card.n_distinct;
      c.cardinality_ratio = card.ratio;
      const StringPool& p = *f.storage().pools[m.physical];
      c.data_bytes = (p.size() + 1) * 8 + p.byte_size();
    } else {
      c.data_bytes = n * 8;
    }
    report.columns.push_back(std::move(c));
  }
  return report;
}

}  // namespace cardframe
