#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cardframe/errors.hpp"

namespace cardframe {

// Raw 64-bit cell; the owning column's dtype decides the interpretation.
using Cell64 = uint64_t;
using RowId = uint32_t;

enum class LogicalDtype : uint8_t {
  Int64 = 0,
  Float64 = 1,
  Date = 2,       // days since 1970-01-01, signed
  DictCode = 3,   // index into a per-column dictionary
  RawString = 4,  // offloaded to a string pool
};

const char* dtype_name(LogicalDtype d);
inline bool dtype_in_block(LogicalDtype d) { return d != LogicalDtype::RawString; }

enum class StorageKind : uint8_t { Block, Pool };

// One logical column slot: where the bytes live and how to read them.
struct ColumnMeta {
  LogicalDtype dtype{};
  StorageKind storage{};
  uint32_t physical = 0;  // slot in the block or the pool list
  int32_t dict_id = -1;   // DictCode only
};

// offsets[0] = 0, monotone, size n+1; bytes holds the concatenated UTF-8.
struct StringPool {
  std::vector<uint64_t> offsets{0};
  std::string bytes;

  size_t size() const { return offsets.size() - 1; }
  std::string_view at(size_t i) const {
    return std::string_view(bytes).substr(offsets[i], offsets[i + 1] - offsets[i]);
  }
  void append(std::string_view s) {
    bytes.append(s);
    offsets.push_back(bytes.size());
  }
  uint64_t byte_size() const { return bytes.size(); }
};

struct StringHash {
  using is_transparent = void;
  size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};
using StringCodeMap =
    std::unordered_map<std::string, int64_t, StringHash, std::equal_to<>>;

// Bijective value <-> dense code table; codes are first-occurrence order.
struct Dictionary {
  std::vector<std::string> values;
  StringCodeMap index;

  size_t size() const { return values.size(); }
  std::string_view value(int64_t code) const;
  std::optional<int64_t> code_of(std::string_view v) const {
    auto it = index.find(v);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
  int64_t add_or_get(std::string_view v);
  uint64_t value_bytes() const;
  static Dictionary from_values(std::vector<std::string> vals);
};

// Shared immutable physical storage. Column payloads are individually shared
// so layout operations copy descriptors, never cells.
struct FrameStorage {
  uint64_t n_rows = 0;
  std::vector<std::shared_ptr<const std::vector<Cell64>>> block;
  std::vector<std::shared_ptr<const StringPool>> pools;
  std::vector<std::shared_ptr<const Dictionary>> dicts;
};

class Frame;

// Resolved accessor for one logical column. Indices are logical rows.
struct ColumnView {
  const Frame* frame = nullptr;
  uint32_t logical_pos = 0;
  ColumnMeta meta{};
  const std::vector<Cell64>* cells = nullptr;  // Block storage
  const StringPool* pool = nullptr;            // Pool storage
  const Dictionary* dict = nullptr;            // DictCode only

  LogicalDtype dtype() const { return meta.dtype; }
  inline Cell64 raw(size_t i) const;
  int64_t i64(size_t i) const { return std::bit_cast<int64_t>(raw(i)); }
  double f64(size_t i) const { return std::bit_cast<double>(raw(i)); }
  inline std::string_view str(size_t i) const;  // RawString or decoded DictCode
};

struct SortKey {
  std::string name;
  bool ascending = true;
};

struct ColumnFootprint {
  std::string name;
  LogicalDtype dtype{};
  uint64_t data_bytes = 0;        // block: 8*n; pool: 8*(n+1) + bytes
  uint64_t dict_value_bytes = 0;  // DictCode: sum of dictionary value lengths
  uint64_t dict_index_bytes = 0;  // lookup-structure overhead, kept separate
  uint64_t total() const { return data_bytes + dict_value_bytes + dict_index_bytes; }
};

struct FootprintReport {
  uint64_t n_rows = 0;
  std::vector<ColumnFootprint> columns;
  uint64_t total_bytes() const;
};

// Immutable columnar frame. Logical shape = (row indexer, column list) over
// shared physical storage; operations return new frames or views.
class Frame {
 public:
  Frame();
  // Identity view over every storage row, in physical order.
  Frame(std::shared_ptr<const FrameStorage> storage, std::vector<std::string> names,
        std::vector<ColumnMeta> metas);
  // Low-level constructor; validates every structural invariant (unique
  // names, slot agreement, in-range and duplicate-free row ids). row_idx is
  // the literal logical->physical map: an empty vector is a zero-row view,
  // not shorthand for identity.
  Frame(std::shared_ptr<const FrameStorage> storage, std::vector<std::string> names,
        std::vector<ColumnMeta> metas, std::vector<RowId> row_idx);

  size_t n_rows() const { return row_identity_ ? size_t(storage_->n_rows) : row_idx_.size(); }
  size_t n_cols() const { return names_.size(); }
  size_t physical_rows() const { return storage_->n_rows; }
  bool identity_rows() const { return row_identity_; }

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<ColumnMeta>& metas() const { return metas_; }
  const FrameStorage& storage() const { return *storage_; }
  std::shared_ptr<const FrameStorage> storage_ptr() const { return storage_; }
  const std::vector<RowId>& row_index() const { return row_idx_; }

  bool has_column(std::string_view name) const;
  size_t column_pos(std::string_view name) const;  // NameError
  ColumnView column(size_t pos) const;
  ColumnView column(std::string_view name) const { return column(column_pos(name)); }

  RowId physical_row(size_t logical) const {
    return row_identity_ ? RowId(logical) : row_idx_[logical];
  }

  // Layout operations (views; storage shared).
  Frame select_columns(const std::vector<std::string>& names) const;
  Frame sort_by(const std::vector<SortKey>& keys) const;
  Frame distinct(const std::vector<std::string>& keys) const;
  Frame limit(size_t k) const;
  Frame renamed(const std::vector<std::pair<std::string, std::string>>& renames) const;
  Frame with_row_index(std::vector<RowId> rows) const;  // validated narrow/permute

  // Materializing operations.
  Frame gather_rows(std::span<const RowId> physical_ids) const;  // ids may repeat
  Frame materialize() const;
  // Requires identity rows; name must be fresh; cells.size() == physical_rows.
  Frame append_block_column(const std::string& name, LogicalDtype dtype,
                            std::vector<Cell64> cells) const;

  FootprintReport memory_footprint() const;

 private:
  std::shared_ptr<const FrameStorage> storage_;
  std::vector<std::string> names_;
  std::vector<ColumnMeta> metas_;
  std::vector<RowId> row_idx_;  // unused when row_identity_
  bool row_identity_ = true;
};

inline Cell64 ColumnView::raw(size_t i) const {
  return (*cells)[frame->physical_row(i)];
}

inline std::string_view ColumnView::str(size_t i) const {
  if (meta.storage == StorageKind::Pool) return pool->at(frame->physical_row(i));
  return dict->value(std::bit_cast<int64_t>(raw(i)));
}

// Column-by-column frame assembly; add_* validates lengths against n_rows.
class FrameBuilder {
 public:
  explicit FrameBuilder(size_t n_rows);

  FrameBuilder& add_i64(const std::string& name, std::vector<int64_t> v);
  FrameBuilder& add_f64(const std::string& name, std::vector<double> v);
  FrameBuilder& add_date(const std::string& name, std::vector<int64_t> days);
  FrameBuilder& add_dict(const std::string& name, std::vector<int64_t> codes,
                         Dictionary dict);
  FrameBuilder& add_raw_string(const std::string& name,
                               std::span<const std::string> v);
  FrameBuilder& add_raw_string(const std::string& name,
                               std::initializer_list<std::string> v) {
    return add_raw_string(name,
                          std::span<const std::string>(v.begin(), v.size()));
  }
  FrameBuilder& add_cells(const std::string& name, LogicalDtype dtype,
                          std::vector<Cell64> cells);
  Frame build();

 private:
  size_t n_rows_;
  std::shared_ptr<FrameStorage> storage_;
  std::vector<std::string> names_;
  std::vector<ColumnMeta> metas_;
  bool built_ = false;
};

// Decoded logical string values (RawString or DictCode column). Views stay
// valid while the frame's storage is alive.
std::vector<std::string_view> collect_str(const Frame& f, size_t pos);

}  // namespace cardframe
