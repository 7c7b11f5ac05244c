#pragma once

#include <string>
#include <variant>
#include <vector>

#include "cardframe/expr.hpp"
#include "cardframe/frame.hpp"
#include "cardframe/groupby.hpp"

namespace cardframe {

// Deliberately naive row-major reference engine: per-row expression
// interpretation, association-list grouping, nested-loop joins, a DP LIKE
// matcher. No hashing and no key machinery shared with the main engine.

enum class PlainDtype : uint8_t { I64, F64, Date, Str };

using PlainValue = std::variant<int64_t, double, std::string>;

struct PlainTable {
  std::vector<std::string> names;
  std::vector<PlainDtype> dtypes;
  std::vector<std::vector<PlainValue>> rows;  // rectangular, row-major

  size_t n_rows() const { return rows.size(); }
  size_t n_cols() const { return names.size(); }
  size_t col(std::string_view name) const;  // NameError
};

// Decodes dictionary and pool columns and applies both indexers.
PlainTable to_plain(const Frame& f);
// Re-encodes string columns by cardinality; from_plain(to_plain(f)) is
// logically equal to f.
Frame from_plain(const PlainTable& t, double threshold = 0.5);

bool plain_like_match(std::string_view s, std::string_view pattern);  // O(|s|*|p|) DP

PlainTable naive_filter(const PlainTable& t, const Expr& e);
PlainTable naive_compute(const PlainTable& t, const Expr& e,
                         const std::string& out_name);
PlainTable naive_groupby(const PlainTable& t, const std::vector<std::string>& keys,
                         const AggSpec& spec);
PlainTable naive_inner_join(const PlainTable& l, const PlainTable& r,
                            const std::vector<std::pair<std::string, std::string>>& keys);
PlainTable naive_semi_join(const PlainTable& l, const PlainTable& r,
                           const std::vector<std::pair<std::string, std::string>>& keys);
PlainTable naive_anti_join(const PlainTable& l, const PlainTable& r,
                           const std::vector<std::pair<std::string, std::string>>& keys);
PlainTable naive_sort(const PlainTable& t, const std::vector<SortKey>& keys);
PlainTable naive_limit(const PlainTable& t, size_t k);
PlainTable naive_distinct(const PlainTable& t, const std::vector<std::string>& keys);
PlainTable naive_concat(const PlainTable& a, const PlainTable& b);
PlainTable naive_select(const PlainTable& t, const std::vector<std::string>& names);

// Value comparison used by equivalence tests: exact for integers, dates and
// strings; Float64 passes on identical bits or relative error <= rel_tol
// (division-derived cells).
bool plain_equal(const PlainTable& a, const PlainTable& b, double rel_tol = 1e-9,
                 std::string* why = nullptr);

}  // namespace cardframe
