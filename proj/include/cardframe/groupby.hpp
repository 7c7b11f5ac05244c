#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cardframe/frame.hpp"
#include "cardframe/hash.hpp"

namespace cardframe {

enum class GroupStrategy : uint8_t {
  Transposed,   // row-major key buffer, one non-incremental hash per row
  Incremental,  // per-column dense codes, hash folded in column by column
};

struct GroupOptions {
  GroupStrategy strategy = GroupStrategy::Transposed;
  HashSpec hash{};
  size_t chunk_size = 0;  // parallel chunking hint; never affects results
};

// Partition of the logical rows. Group ids are dense and numbered by first
// logical occurrence; rep_rows[g] is the logical row that opened group g.
struct GroupTable {
  uint32_t n_groups = 0;
  std::vector<uint32_t> row_to_group;
  std::vector<uint32_t> rep_rows;
};

// n-rows-by-k row-major key buffer. Block keys contribute their raw cells;
// pool string keys are factorized to dense codes first. Words only ever meet
// words from the same column, so equality of word tuples is equality of keys.
std::vector<uint64_t> transpose_gather(const Frame& f,
                                       const std::vector<std::string>& keys);

GroupTable group_rows(const Frame& f, const std::vector<std::string>& keys,
                      const GroupOptions& opt = {});
GroupTable group_rows_incremental(const Frame& f,
                                  const std::vector<std::string>& keys,
                                  const GroupOptions& opt = {});
// Dispatch on opt.strategy; both strategies yield the same table.
GroupTable build_groups(const Frame& f, const std::vector<std::string>& keys,
                        const GroupOptions& opt = {});

enum class AggFn : uint8_t { Sum, Count, Mean, Min, Max, CountDistinct };

struct AggItem {
  std::string column;
  AggFn fn{};
  std::string out_name;
};
using AggSpec = std::vector<AggItem>;

// One output row per group, in group order: key columns first (dict/string
// keys decoded, then re-encoded by cardinality), aggregates after. Float64
// accumulation runs in logical row order; Int64 sums are overflow-checked.
Frame aggregate(const Frame& f, const std::vector<std::string>& keys,
                const GroupTable& gt, const AggSpec& spec);

Frame group_by(const Frame& f, const std::vector<std::string>& keys,
               const AggSpec& spec, const GroupOptions& opt = {});

}  // namespace cardframe
