#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cardframe/frame.hpp"

namespace cardframe {

enum class CardinalityVerdict : uint8_t { Low, High };

struct CardinalityReport {
  uint64_t n_rows = 0;
  uint64_t n_distinct = 0;
  double ratio = 0.0;  // n_distinct / n_rows; 0 for the empty column
  CardinalityVerdict verdict = CardinalityVerdict::Low;
};

// High iff ratio is strictly greater than threshold; threshold in (0, 1].
CardinalityReport analyze_cardinality(std::span<const std::string_view> col,
                                      double threshold = 0.5);

struct DictEncodeResult {
  std::vector<int64_t> codes;  // dense, first-occurrence order
  Dictionary dict;
};
DictEncodeResult dict_encode(std::span<const std::string_view> col);

// CodeError on any code outside the dictionary.
std::vector<std::string> dict_decode(std::span<const int64_t> codes,
                                     const Dictionary& dict);

// Shared value <-> code table spanning two columns.
using FactorMap = Dictionary;

struct FactorizePairResult {
  std::vector<int64_t> left;
  std::vector<int64_t> right;
  FactorMap map;  // left values first (in order of appearance), then right
};
FactorizePairResult factorize_pair(std::span<const std::string_view> left,
                                   std::span<const std::string_view> right);

// Column helper used by frame construction paths: encode a string column as
// DictCode when its cardinality verdict is Low, RawString otherwise.
void add_string_auto(FrameBuilder& b, const std::string& name,
                     std::span<const std::string> values, double threshold = 0.5);

}  // namespace cardframe
