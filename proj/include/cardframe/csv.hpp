#pragma once

#include <string>
#include <vector>

#include "cardframe/frame.hpp"

namespace cardframe {

enum class CsvDtype : uint8_t { I64, F64, Date, Str };

struct CsvColumnSpec {
  std::string name;
  CsvDtype dtype{};
};

// Sidecar schema: {"delimiter": "|", "columns": [{"name":..., "dtype":
// "i64"|"f64"|"date"|"str"}, ...]} in column order.
struct CsvSchema {
  std::vector<CsvColumnSpec> columns;
  char delimiter = '|';
  double low_card_threshold = 0.5;
};

CsvSchema load_schema(const std::string& path);   // FormatError on bad sidecar
void save_schema(const CsvSchema& s, const std::string& path);

// No quoting; dates are yyyy-mm-dd; one trailing delimiter per line is
// tolerated. Malformed cells raise ParseError with 1-based line and column.
Frame read_csv(const std::string& csv_path, const CsvSchema& schema);

struct ConvertColumnReport {
  std::string name;
  LogicalDtype dtype{};         // dtype chosen for storage
  uint64_t n_distinct = 0;      // string columns only
  double cardinality_ratio = 0; // string columns only
  uint64_t data_bytes = 0;
  uint64_t aux_bytes = 0;
};

struct ConvertReport {
  uint64_t n_rows = 0;
  std::vector<ConvertColumnReport> columns;
};

ConvertReport csv_to_mfb(const std::string& csv_path, const CsvSchema& schema,
                         const std::string& out_path);

}  // namespace cardframe
