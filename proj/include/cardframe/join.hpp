#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cardframe/frame.hpp"
#include "cardframe/hash.hpp"

namespace cardframe {

enum class JoinAlgo : uint8_t { Hash, SortMerge };
enum class BuildSide : uint8_t { Auto, Left, Right };  // Auto: fewer rows, tie -> Right

struct JoinOptions {
  JoinAlgo algo = JoinAlgo::Hash;
  BuildSide build = BuildSide::Auto;
  HashSpec hash{};
  size_t chunk_size = 0;
};

using JoinKeys = std::vector<std::pair<std::string, std::string>>;  // (left, right)

// Physical row ids of the matched pairs, left-major: left rows in logical
// order, each with its matching right rows in ascending right logical order.
// The build-side choice never changes the output.
struct JoinIndex {
  std::vector<RowId> left_rows;
  std::vector<RowId> right_rows;
};

JoinIndex inner_join_index(const Frame& left, const Frame& right,
                           const JoinKeys& keys, const JoinOptions& opt = {});

// Materialized inner join. Right key columns are dropped; remaining right
// names that collide with a left name get a "_right" suffix.
Frame inner_join(const Frame& left, const Frame& right, const JoinKeys& keys,
                 const JoinOptions& opt = {});

// Left rows with at least one match / with no match; each kept at most once,
// logical order preserved. Views over the left frame.
Frame semi_join(const Frame& left, const Frame& right, const JoinKeys& keys,
                const JoinOptions& opt = {});
Frame anti_join(const Frame& left, const Frame& right, const JoinKeys& keys,
                const JoinOptions& opt = {});

}  // namespace cardframe
