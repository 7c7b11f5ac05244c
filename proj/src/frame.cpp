#include "cardframe/frame.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "cardframe/hash.hpp"
#include "cardframe/parallel.hpp"

namespace cardframe {

const char* dtype_name(LogicalDtype d) {
  switch (d) {
    case LogicalDtype::Int64: return "i64";
    case LogicalDtype::Float64: return "f64";
    case LogicalDtype::Date: return "date";
    case LogicalDtype::DictCode: return "dict";
    case LogicalDtype::RawString: return "str";
  }
  return "?";
}

/* ---------------- Dictionary ---------------- */

std::string_view Dictionary::value(int64_t code) const {
  if (code < 0 || size_t(code) >= values.size())
    throw CodeError("dictionary code out of range: " + std::to_string(code));
  return values[size_t(code)];
}

int64_t Dictionary::add_or_get(std::string_view v) {
  auto it = index.find(v);
  if (it != index.end()) return it->second;
  int64_t code = int64_t(values.size());
  values.emplace_back(v);
  index.emplace(values.back(), code);
  return code;
}

uint64_t Dictionary::value_bytes() const {
  uint64_t total = 0;
  for (const auto& v : values) total += v.size();
  return total;
}

Dictionary Dictionary::from_values(std::vector<std::string> vals) {
  Dictionary d;
  d.values = std::move(vals);
  for (size_t i = 0; i < d.values.size(); ++i) {
    auto [it, fresh] = d.index.emplace(d.values[i], int64_t(i));
    if (!fresh) throw CodeError("duplicate dictionary value: " + d.values[i]);
  }
  return d;
}

/* ---------------- Frame ---------------- */

namespace {

void validate_columns(const FrameStorage& st, const std::vector<std::string>& names,
                      const std::vector<ColumnMeta>& metas) {
  if (names.size() != metas.size()) throw Error("names/metas size mismatch");
  std::unordered_map<std::string_view, int> seen_names;
  std::unordered_map<uint64_t, int> seen_slots;
  for (size_t i = 0; i < names.size(); ++i) {
    if (++seen_names[names[i]] > 1)
      throw NameError("duplicate column name: " + names[i], names[i]);
    const ColumnMeta& m = metas[i];
    if (dtype_in_block(m.dtype) != (m.storage == StorageKind::Block))
      throw Error("dtype/storage mismatch for column " + names[i]);
    uint64_t slot = (uint64_t(m.storage == StorageKind::Pool) << 32) | m.physical;
    if (++seen_slots[slot] > 1)
      throw Error("physical slot referenced twice: " + names[i]);
    if (m.storage == StorageKind::Block) {
      if (m.physical >= st.block.size())
        throw Error("block slot out of range: " + names[i]);
      if (st.block[m.physical]->size() != st.n_rows)
        throw Error("block column length mismatch: " + names[i]);
    } else {
      if (m.physical >= st.pools.size())
        throw Error("pool slot out of range: " + names[i]);
      if (st.pools[m.physical]->size() != st.n_rows)
        throw Error("pool length mismatch: " + names[i]);
    }
    if (m.dtype == LogicalDtype::DictCode) {
      if (m.dict_id < 0 || size_t(m.dict_id) >= st.dicts.size())
        throw Error("dictionary id out of range: " + names[i]);
      const auto& cells = *st.block[m.physical];
      int64_t n_values = int64_t(st.dicts[size_t(m.dict_id)]->size());
      for (Cell64 c : cells) {
        int64_t code = std::bit_cast<int64_t>(c);
        if (code < 0 || code >= n_values)
          throw CodeError("code out of dictionary range in column " + names[i]);
      }
    }
  }
}

void validate_row_index(const FrameStorage& st, const std::vector<RowId>& rows) {
  std::vector<uint8_t> seen(st.n_rows, 0);
  for (RowId r : rows) {
    if (r >= st.n_rows)
      throw BoundsError("row id " + std::to_string(r) + " outside " +
                        std::to_string(st.n_rows) + " physical rows");
    if (seen[r]++)  // duplicates would alias one physical row in a view
      throw Error("duplicate row id in row index: " + std::to_string(r));
  }
}

bool is_identity(const std::vector<RowId>& rows, uint64_t n_rows) {
  if (rows.size() != n_rows) return false;
  for (size_t i = 0; i < rows.size(); ++i)
    if (rows[i] != i) return false;
  return true;
}

}  // namespace

Frame::Frame() : storage_(std::make_shared<FrameStorage>()) {}

Frame::Frame(std::shared_ptr<const FrameStorage> storage,
             std::vector<std::string> names, std::vector<ColumnMeta> metas)
    : storage_(std::move(storage)),
      names_(std::move(names)),
      metas_(std::move(metas)) {
  validate_columns(*storage_, names_, metas_);
  row_identity_ = true;
}

Frame::Frame(std::shared_ptr<const FrameStorage> storage,
             std::vector<std::string> names, std::vector<ColumnMeta> metas,
             std::vector<RowId> row_idx)
    : storage_(std::move(storage)),
      names_(std::move(names)),
      metas_(std::move(metas)) {
  validate_columns(*storage_, names_, metas_);
  if (is_identity(row_idx, storage_->n_rows)) {
    row_identity_ = true;
  } else {
    validate_row_index(*storage_, row_idx);
    row_idx_ = std::move(row_idx);
    row_identity_ = false;
  }
}

bool Frame::has_column(std::string_view name) const {
  for (const auto& n : names_)
    if (n == name) return true;
  return false;
}

size_t Frame::column_pos(std::string_view name) const {
  for (size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  throw NameError(std::string(name));
}

ColumnView Frame::column(size_t pos) const {
  if (pos >= metas_.size())
    throw BoundsError("column position out of range: " + std::to_string(pos));
  const ColumnMeta& m = metas_[pos];
  ColumnView v;
  v.frame = this;
  v.logical_pos = uint32_t(pos);
  v.meta = m;
  if (m.storage == StorageKind::Block) v.cells = storage_->block[m.physical].get();
  else v.pool = storage_->pools[m.physical].get();
  if (m.dtype == LogicalDtype::DictCode) v.dict = storage_->dicts[m.dict_id].get();
  return v;
}

Frame Frame::select_columns(const std::vector<std::string>& names) const {
  std::vector<std::string> out_names;
  std::vector<ColumnMeta> out_metas;
  out_names.reserve(names.size());
  for (const auto& n : names) {
    size_t pos = column_pos(n);
    out_names.push_back(names_[pos]);
    out_metas.push_back(metas_[pos]);
  }
  Frame out;
  out.storage_ = storage_;
  out.names_ = std::move(out_names);
  out.metas_ = std::move(out_metas);
  validate_columns(*out.storage_, out.names_, out.metas_);  // rejects duplicates
  out.row_idx_ = row_idx_;
  out.row_identity_ = row_identity_;
  return out;
}

Frame Frame::with_row_index(std::vector<RowId> rows) const {
  Frame out;
  out.storage_ = storage_;
  out.names_ = names_;
  out.metas_ = metas_;
  if (is_identity(rows, storage_->n_rows)) {
    out.row_identity_ = true;
  } else {
    validate_row_index(*storage_, rows);
    out.row_idx_ = std::move(rows);
    out.row_identity_ = false;
  }
  return out;
}

Frame Frame::limit(size_t k) const {
  size_t n = n_rows();
  size_t keep = std::min(k, n);
  std::vector<RowId> rows(keep);
  for (size_t i = 0; i < keep; ++i) rows[i] = physical_row(i);
  return with_row_index(std::move(rows));
}

Frame Frame::renamed(
    const std::vector<std::pair<std::string, std::string>>& renames) const {
  Frame out = *this;
  for (const auto& [from, to] : renames) {
    size_t pos = out.column_pos(from);
    out.names_[pos] = to;
  }
  validate_columns(*out.storage_, out.names_, out.metas_);
  return out;
}

Frame Frame::sort_by(const std::vector<SortKey>& keys) const {
  if (keys.empty()) throw Error("sort_by needs at least one key");
  const size_t n = n_rows();

  // One decoded key array per sort key; comparisons never touch the frame.
  struct KeyArray {
    LogicalDtype dtype;
    bool ascending;
    std::vector<int64_t> i64s;
    std::vector<double> f64s;
    std::vector<std::string_view> strs;
  };
  std::vector<KeyArray> arrays;
  arrays.reserve(keys.size());
  for (const auto& k : keys) {
    ColumnView c = column(column_pos(k.name));
    KeyArray a;
    a.dtype = c.dtype();
    a.ascending = k.ascending;
    switch (c.dtype()) {
      case LogicalDtype::Float64:
        a.f64s.resize(n);
        for (size_t i = 0; i < n; ++i) a.f64s[i] = c.f64(i);
        break;
      case LogicalDtype::RawString:
      case LogicalDtype::DictCode:
        a.strs.resize(n);
        for (size_t i = 0; i < n; ++i) a.strs[i] = c.str(i);
        break;
      default:
        a.i64s.resize(n);
        for (size_t i = 0; i < n; ++i) a.i64s[i] = c.i64(i);
        break;
    }
    arrays.push_back(std::move(a));
  }

  std::vector<uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](uint32_t x, uint32_t y) {
    for (const auto& a : arrays) {
      int c;
      if (!a.i64s.empty())
        c = a.i64s[x] < a.i64s[y] ? -1 : (a.i64s[x] > a.i64s[y] ? 1 : 0);
      else if (!a.f64s.empty())
        c = a.f64s[x] < a.f64s[y] ? -1 : (a.f64s[x] > a.f64s[y] ? 1 : 0);
      else
        c = a.strs[x].compare(a.strs[y]) < 0
                ? -1
                : (a.strs[x].compare(a.strs[y]) > 0 ? 1 : 0);
      if (c != 0) return a.ascending ? c < 0 : c > 0;
    }
    return false;  // stable ties keep prior logical order
  });

  std::vector<RowId> rows(n);
  for (size_t i = 0; i < n; ++i) rows[i] = physical_row(perm[i]);
  return with_row_index(std::move(rows));
}

Frame Frame::distinct(const std::vector<std::string>& keys) const {
  if (keys.empty()) throw Error("distinct needs at least one key");
  const size_t n = n_rows();
  const size_t k = keys.size();

  // Per-column dense codes make key tuples plain word tuples.
  std::vector<std::vector<uint64_t>> words(k);
  for (size_t j = 0; j < k; ++j) {
    ColumnView c = column(column_pos(keys[j]));
    words[j].resize(n);
    if (c.meta.storage == StorageKind::Pool) {
      StringCodeMap local;
      for (size_t i = 0; i < n; ++i) {
        auto s = c.str(i);
        auto it = local.find(s);
        if (it == local.end())
          it = local.emplace(std::string(s), int64_t(local.size())).first;
        words[j][i] = uint64_t(it->second);
      }
    } else {
      for (size_t i = 0; i < n; ++i) words[j][i] = c.raw(i);
    }
  }

  struct TupleHash {
    const std::vector<std::vector<uint64_t>>* w;
    size_t operator()(size_t row) const {
      uint64_t h = kDefaultHashSeed;
      for (const auto& col : *w) h = mix64(h ^ mix64(col[row] + kGolden));
      return size_t(h);
    }
  };
  struct TupleEq {
    const std::vector<std::vector<uint64_t>>* w;
    bool operator()(size_t a, size_t b) const {
      for (const auto& col : *w)
        if (col[a] != col[b]) return false;
      return true;
    }
  };
  std::unordered_set<size_t, TupleHash, TupleEq> seen(16, TupleHash{&words},
                                                      TupleEq{&words});
  std::vector<RowId> rows;
  for (size_t i = 0; i < n; ++i)
    if (seen.insert(i).second) rows.push_back(physical_row(i));
  return with_row_index(std::move(rows));
}

Frame Frame::gather_rows(std::span<const RowId> ids) const {
  for (RowId r : ids)
    if (r >= storage_->n_rows)
      throw BoundsError("gather id " + std::to_string(r) + " outside " +
                        std::to_string(storage_->n_rows) + " physical rows");

  const size_t m = ids.size();
  auto out = std::make_shared<FrameStorage>();
  out->n_rows = m;
  std::vector<ColumnMeta> out_metas(metas_.size());

  for (size_t j = 0; j < metas_.size(); ++j) {
    const ColumnMeta& meta = metas_[j];
    ColumnMeta nm = meta;
    if (meta.storage == StorageKind::Block) {
      const auto& src = *storage_->block[meta.physical];
      auto dst = std::make_shared<std::vector<Cell64>>(m);
      auto* raw = dst->data();
      for_each_chunk(m, 0, [&](size_t, size_t b, size_t e) {
        for (size_t i = b; i < e; ++i) raw[i] = src[ids[i]];
      });
      nm.physical = uint32_t(out->block.size());
      out->block.push_back(std::move(dst));
      if (meta.dtype == LogicalDtype::DictCode) {
        nm.dict_id = int32_t(out->dicts.size());
        out->dicts.push_back(storage_->dicts[meta.dict_id]);  // codes unchanged
      }
    } else {
      const auto& src = *storage_->pools[meta.physical];
      auto dst = std::make_shared<StringPool>();
      uint64_t total = 0;
      for (size_t i = 0; i < m; ++i)
        total += src.offsets[ids[i] + 1] - src.offsets[ids[i]];
      dst->offsets.reserve(m + 1);
      dst->bytes.reserve(total);
      for (size_t i = 0; i < m; ++i) dst->append(src.at(ids[i]));
      nm.physical = uint32_t(out->pools.size());
      out->pools.push_back(std::move(dst));
    }
    out_metas[j] = nm;
  }
  return Frame(std::move(out), names_, std::move(out_metas));
}

Frame Frame::materialize() const {
  if (row_identity_) return *this;
  return gather_rows(row_idx_);
}

Frame Frame::append_block_column(const std::string& name, LogicalDtype dtype,
                                 std::vector<Cell64> cells) const {
  if (!row_identity_)
    throw Error("append_block_column requires identity rows; materialize first");
  if (!dtype_in_block(dtype)) throw Error("appended column must be a block dtype");
  if (cells.size() != storage_->n_rows)
    throw Error("appended column length mismatch");
  if (has_column(name))
    throw NameError("duplicate column name: " + name, name);

  auto st = std::make_shared<FrameStorage>(*storage_);  // shares column payloads
  ColumnMeta meta;
  meta.dtype = dtype;
  meta.storage = StorageKind::Block;
  meta.physical = uint32_t(st->block.size());
  st->block.push_back(std::make_shared<std::vector<Cell64>>(std::move(cells)));

  std::vector<std::string> names = names_;
  std::vector<ColumnMeta> metas = metas_;
  names.push_back(name);
  metas.push_back(meta);
  return Frame(std::move(st), std::move(names), std::move(metas));
}

FootprintReport Frame::memory_footprint() const {
  FootprintReport rep;
  rep.n_rows = storage_->n_rows;
  const uint64_t n = storage_->n_rows;
  for (size_t j = 0; j < metas_.size(); ++j) {
    const ColumnMeta& m = metas_[j];
    ColumnFootprint c;
    c.name = names_[j];
    c.dtype = m.dtype;
    if (m.storage == StorageKind::Block) {
      c.data_bytes = 8 * n;
      if (m.dtype == LogicalDtype::DictCode) {
        const Dictionary& d = *storage_->dicts[m.dict_id];
        c.dict_value_bytes = d.value_bytes();
        // Estimated lookup-side cost: string object plus one table entry per
        // distinct value.
        c.dict_index_bytes = uint64_t(d.size()) * (sizeof(std::string) + 16);
      }
    } else {
      const StringPool& p = *storage_->pools[m.physical];
      c.data_bytes = 8 * (n + 1) + p.byte_size();
    }
    rep.columns.push_back(std::move(c));
  }
  return rep;
}

uint64_t FootprintReport::total_bytes() const {
  uint64_t t = 0;
  for (const auto& c : columns) t += c.total();
  return t;
}

/* ---------------- FrameBuilder ---------------- */

FrameBuilder::FrameBuilder(size_t n_rows)
    : n_rows_(n_rows), storage_(std::make_shared<FrameStorage>()) {
  storage_->n_rows = n_rows;
}

namespace {
std::vector<Cell64> to_cells_i64(const std::vector<int64_t>& v) {
  std::vector<Cell64> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = std::bit_cast<Cell64>(v[i]);
  return out;
}
std::vector<Cell64> to_cells_f64(const std::vector<double>& v) {
  std::vector<Cell64> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = std::bit_cast<Cell64>(v[i]);
  return out;
}
}  // namespace

FrameBuilder& FrameBuilder::add_cells(const std::string& name, LogicalDtype dtype,
                                      std::vector<Cell64> cells) {
  if (built_) throw Error("builder already consumed");
  if (!dtype_in_block(dtype)) throw Error("add_cells takes block dtypes only");
  if (cells.size() != n_rows_) throw Error("column length mismatch: " + name);
  ColumnMeta m;
  m.dtype = dtype;
  m.storage = StorageKind::Block;
  m.physical = uint32_t(storage_->block.size());
  storage_->block.push_back(std::make_shared<std::vector<Cell64>>(std::move(cells)));
  names_.push_back(name);
  metas_.push_back(m);
  return *this;
}

FrameBuilder& FrameBuilder::add_i64(const std::string& name, std::vector<int64_t> v) {
  return add_cells(name, LogicalDtype::Int64, to_cells_i64(v));
}

FrameBuilder& FrameBuilder::add_f64(const std::string& name, std::vector<double> v) {
  return add_cells(name, LogicalDtype::Float64, to_cells_f64(v));
}

FrameBuilder& FrameBuilder::add_date(const std::string& name,
                                     std::vector<int64_t> days) {
  return add_cells(name, LogicalDtype::Date, to_cells_i64(days));
}

FrameBuilder& FrameBuilder::add_dict(const std::string& name,
                                     std::vector<int64_t> codes, Dictionary dict) {
  if (built_) throw Error("builder already consumed");
  if (codes.size() != n_rows_) throw Error("column length mismatch: " + name);
  ColumnMeta m;
  m.dtype = LogicalDtype::DictCode;
  m.storage = StorageKind::Block;
  m.physical = uint32_t(storage_->block.size());
  m.dict_id = int32_t(storage_->dicts.size());
  storage_->block.push_back(
      std::make_shared<std::vector<Cell64>>(to_cells_i64(codes)));
  storage_->dicts.push_back(std::make_shared<Dictionary>(std::move(dict)));
  names_.push_back(name);
  metas_.push_back(m);
  return *this;
}

FrameBuilder& FrameBuilder::add_raw_string(const std::string& name,
                                           std::span<const std::string> v) {
  if (built_) throw Error("builder already consumed");
  if (v.size() != n_rows_) throw Error("column length mismatch: " + name);
  auto pool = std::make_shared<StringPool>();
  uint64_t total = 0;
  for (const auto& s : v) total += s.size();
  pool->offsets.reserve(v.size() + 1);
  pool->bytes.reserve(total);
  for (const auto& s : v) pool->append(s);
  ColumnMeta m;
  m.dtype = LogicalDtype::RawString;
  m.storage = StorageKind::Pool;
  m.physical = uint32_t(storage_->pools.size());
  storage_->pools.push_back(std::move(pool));
  names_.push_back(name);
  metas_.push_back(m);
  return *this;
}

Frame FrameBuilder::build() {
  if (built_) throw Error("builder already consumed");
  built_ = true;
  return Frame(std::move(storage_), std::move(names_), std::move(metas_));
}

std::vector<std::string_view> collect_str(const Frame& f, size_t pos) {
  ColumnView c = f.column(pos);
  if (c.dtype() != LogicalDtype::RawString && c.dtype() != LogicalDtype::DictCode)
    throw Error("collect_str on non-string column: " + f.names()[pos]);
  std::vector<std::string_view> out(f.n_rows());
  for (size_t i = 0; i < out.size(); ++i) out[i] = c.str(i);
  return out;
}

}  // namespace cardframe
