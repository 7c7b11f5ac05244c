#include "cardframe/encoding.hpp"

#include <unordered_set>

namespace cardframe {

CardinalityReport analyze_cardinality(std::span<const std::string_view> col,
                                      double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw Error("cardinality threshold must be in (0, 1]");
  CardinalityReport rep;
  rep.n_rows = col.size();
  std::unordered_set<std::string_view> distinct(col.begin(), col.end());
  rep.n_distinct = distinct.size();
  rep.ratio = rep.n_rows == 0 ? 0.0 : double(rep.n_distinct) / double(rep.n_rows);
  // Strictly greater: a ratio exactly at the threshold stays Low.
  rep.verdict = rep.ratio > threshold ? CardinalityVerdict::High
                                      : CardinalityVerdict::Low;
  return rep;
}

DictEncodeResult dict_encode(std::span<const std::string_view> col) {
  DictEncodeResult out;
  out.codes.resize(col.size());
  for (size_t i = 0; i < col.size(); ++i)
    out.codes[i] = out.dict.add_or_get(col[i]);
  return out;
}

std::vector<std::string> dict_decode(std::span<const int64_t> codes,
                                     const Dictionary& dict) {
  std::vector<std::string> out;
  out.reserve(codes.size());
  for (int64_t c : codes) out.emplace_back(dict.value(c));
  return out;
}

FactorizePairResult factorize_pair(std::span<const std::string_view> left,
                                   std::span<const std::string_view> right) {
  FactorizePairResult out;
  out.left.resize(left.size());
  out.right.resize(right.size());
  // Left column scanned fully before the right one; codes are dense over the
  // union in that first-occurrence order.
  for (size_t i = 0; i < left.size(); ++i) out.left[i] = out.map.add_or_get(left[i]);
  for (size_t i = 0; i < right.size(); ++i)
    out.right[i] = out.map.add_or_get(right[i]);
  return out;
}

void add_string_auto(FrameBuilder& b, const std::string& name,
                     std::span<const std::string> values, double threshold) {
  std::vector<std::string_view> views(values.begin(), values.end());
  CardinalityReport rep = analyze_cardinality(views, threshold);
  if (rep.verdict == CardinalityVerdict::Low) {
    DictEncodeResult enc = dict_encode(views);
    b.add_dict(name, std::move(enc.codes), std::move(enc.dict));
  } else {
    b.add_raw_string(name, values);
  }
}

}  // namespace cardframe
