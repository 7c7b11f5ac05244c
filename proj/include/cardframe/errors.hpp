#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cardframe {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unknown or duplicate column name.
struct NameError : Error {
  explicit NameError(std::string col)
      : Error("unknown column: " + col), column(std::move(col)) {}
  NameError(std::string msg, std::string col)
      : Error(std::move(msg)), column(std::move(col)) {}
  std::string column;
};

// Row id outside the physical row range.
struct BoundsError : Error {
  using Error::Error;
};

// Dictionary code with no entry.
struct CodeError : Error {
  using Error::Error;
};

// Ill-typed or ill-formed expression tree.
struct ExprError : Error {
  using Error::Error;
};

// Aggregate function applied to an unsupported input dtype.
struct AggError : Error {
  using Error::Error;
};

// Int64 accumulation left the representable range.
struct OverflowError : Error {
  using Error::Error;
};

// Join key pairs that cannot be compared.
struct JoinError : Error {
  using Error::Error;
};

// Malformed on-disk file (bad magic, version, truncation).
struct FormatError : Error {
  using Error::Error;
};

// Text input rejected at a specific 1-based line/column.
struct ParseError : Error {
  ParseError(const std::string& msg, size_t line, size_t column)
      : Error(msg + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line(line),
        column(column) {}
  size_t line;
  size_t column;
};

}  // namespace cardframe
