#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cardframe/frame.hpp"
#include "cardframe/groupby.hpp"
#include "cardframe/join.hpp"
#include "cardframe/mfb.hpp"

namespace cardframe {

// Decision-support catalog: q1, q3, q5, q6, q9, q13 over the generated
// schema. Every pipeline ends in a fully deterministic sort, so the
// order-sensitive content hash is well-defined and knob-invariant.

struct QueryOptions {
  int threads = 1;
  GroupStrategy groupby = GroupStrategy::Transposed;
  JoinAlgo join = JoinAlgo::Hash;
  size_t chunk_size = 0;
  HashSpec hash{};
};

struct QueryRun {
  std::string query;
  Frame result;
  IoStats io;
  double load_ms = 0;
  double compute_ms = 0;
  uint64_t content_hash = 0;
};

const std::vector<std::string>& catalog_query_ids();
bool is_catalog_query(const std::string& id);

// Columns each query loads, per table (projection pushdown goes through
// read_mfb with exactly these lists).
std::vector<std::pair<std::string, std::vector<std::string>>> query_columns(
    const std::string& id);

QueryRun run_query(const std::string& id, const std::string& data_dir,
                   const QueryOptions& opt = {});

// Order-sensitive digest over the decoded result (dtype tags, cell values,
// Float64 by bit pattern).
uint64_t content_hash(const Frame& f);

// Row concatenation for count-style zero fill; schemas must agree by name and
// value class. String columns are re-encoded by cardinality.
Frame concat_rows(const Frame& a, const Frame& b);

// Fixed-width text rendering of a result (dates decoded).
std::string format_table(const Frame& f, size_t max_rows = 100);

}  // namespace cardframe
