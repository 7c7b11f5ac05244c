#include "cardframe/groupby.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "cardframe/encoding.hpp"
#include "cardframe/parallel.hpp"

namespace cardframe {

namespace {

bool words_equal(const uint64_t* a, const uint64_t* b, size_t k) {
  for (size_t j = 0; j < k; ++j)
    if (a[j] != b[j]) return false;
  return true;
}

// hash -> candidate group ids; the full-key comparison is authoritative, so
// forced hash collisions only cost time.
struct KeyTable {
  std::unordered_map<uint64_t, std::vector<uint32_t>> buckets;

  template <typename RepWords>
  uint32_t find_or_insert(uint64_t hash, const uint64_t* words, size_t k,
                          RepWords rep_words, uint32_t next_id, bool* fresh) {
    auto& cand = buckets[hash];
    for (uint32_t g : cand)
      if (words_equal(words, rep_words(g), k)) {
        *fresh = false;
        return g;
      }
    cand.push_back(next_id);
    *fresh = true;
    return next_id;
  }
};

GroupTable single_group(size_t n) {
  GroupTable gt;
  gt.n_groups = 1;
  gt.row_to_group.assign(n, 0);
  gt.rep_rows = {0};  // never dereferenced when there are no key columns
  return gt;
}

}  // namespace

std::vector<uint64_t> transpose_gather(const Frame& f,
                                       const std::vector<std::string>& keys) {
  const size_t n = f.n_rows();
  const size_t k = keys.size();
  std::vector<uint64_t> buffer(n * k);

  for (size_t j = 0; j < k; ++j) {
    ColumnView c = f.column(f.column_pos(keys[j]));
    if (c.meta.storage == StorageKind::Pool) {
      // Offloaded strings become dense codes before entering the buffer.
      auto views = collect_str(f, c.logical_pos);
      DictEncodeResult enc = dict_encode(views);
      for (size_t i = 0; i < n; ++i) buffer[i * k + j] = uint64_t(enc.codes[i]);
    } else {
      for_each_chunk(n, 0, [&](size_t, size_t b, size_t e) {
        for (size_t i = b; i < e; ++i) buffer[i * k + j] = c.raw(i);
      });
    }
  }
  return buffer;
}

GroupTable group_rows(const Frame& f, const std::vector<std::string>& keys,
                      const GroupOptions& opt) {
  const size_t n = f.n_rows();
  const size_t k = keys.size();
  if (k == 0) return single_group(n);

  std::vector<uint64_t> buffer = transpose_gather(f, keys);
  std::vector<uint64_t> hashes(n);
  for_each_chunk(n, opt.chunk_size, [&](size_t, size_t b, size_t e) {
    for (size_t i = b; i < e; ++i)
      hashes[i] = opt.hash.words({buffer.data() + i * k, k});
  });

  // Per-chunk local tables, then a sequential merge in chunk order; global
  // ids come out in first-logical-occurrence order no matter the chunking.
  struct Local {
    KeyTable table;
    std::vector<uint32_t> rep_rows;      // logical rows
    std::vector<uint32_t> row_to_local;  // chunk-relative
    size_t begin = 0;
  };
  const size_t n_chunks = chunk_count(n, opt.chunk_size);
  std::vector<Local> locals(n_chunks);
  for_each_chunk(n, opt.chunk_size, [&](size_t c, size_t b, size_t e) {
    Local& lo = locals[c];
    lo.begin = b;
    lo.row_to_local.resize(e - b);
    auto rep_words = [&](uint32_t g) {
      return buffer.data() + size_t(lo.rep_rows[g]) * k;
    };
    for (size_t i = b; i < e; ++i) {
      bool fresh = false;
      uint32_t g = lo.table.find_or_insert(hashes[i], buffer.data() + i * k, k,
                                           rep_words, uint32_t(lo.rep_rows.size()),
                                           &fresh);
      if (fresh) lo.rep_rows.push_back(uint32_t(i));
      lo.row_to_local[i - b] = g;
    }
  });

  GroupTable gt;
  gt.row_to_group.resize(n);
  KeyTable global;
  auto global_rep_words = [&](uint32_t g) {
    return buffer.data() + size_t(gt.rep_rows[g]) * k;
  };
  for (Local& lo : locals) {
    std::vector<uint32_t> to_global(lo.rep_rows.size());
    for (size_t g = 0; g < lo.rep_rows.size(); ++g) {
      uint32_t rep = lo.rep_rows[g];
      bool fresh = false;
      uint32_t gid = global.find_or_insert(
          hashes[rep], buffer.data() + size_t(rep) * k, k, global_rep_words,
          uint32_t(gt.rep_rows.size()), &fresh);
      if (fresh) gt.rep_rows.push_back(rep);
      to_global[g] = gid;
    }
    for (size_t i = 0; i < lo.row_to_local.size(); ++i)
      gt.row_to_group[lo.begin + i] = to_global[lo.row_to_local[i]];
  }
  gt.n_groups = uint32_t(gt.rep_rows.size());
  return gt;
}

GroupTable group_rows_incremental(const Frame& f,
                                  const std::vector<std::string>& keys,
                                  const GroupOptions& opt) {
  const size_t n = f.n_rows();
  const size_t k = keys.size();
  if (k == 0) return single_group(n);

  // Column-by-column: sparse values to dense ids, appended to each row's
  // growing key list while its hash folds in one more word.
  std::vector<uint64_t> codes(n * k);
  std::vector<uint64_t> hashes(n, opt.hash.seed);
  for (size_t j = 0; j < k; ++j) {
    ColumnView c = f.column(f.column_pos(keys[j]));
    if (c.meta.storage == StorageKind::Pool) {
      auto views = collect_str(f, c.logical_pos);
      DictEncodeResult enc = dict_encode(views);
      for (size_t i = 0; i < n; ++i) {
        uint64_t code = uint64_t(enc.codes[i]);
        codes[i * k + j] = code;
        hashes[i] = opt.hash.combine(hashes[i], code);
      }
    } else {
      std::unordered_map<uint64_t, uint64_t> dense;
      for (size_t i = 0; i < n; ++i) {
        uint64_t word = c.raw(i);
        auto [it, fresh] = dense.emplace(word, uint64_t(dense.size()));
        uint64_t code = it->second;
        (void)fresh;
        codes[i * k + j] = code;
        hashes[i] = opt.hash.combine(hashes[i], code);
      }
    }
  }

  GroupTable gt;
  gt.row_to_group.resize(n);
  KeyTable table;
  auto rep_words = [&](uint32_t g) {
    return codes.data() + size_t(gt.rep_rows[g]) * k;
  };
  for (size_t i = 0; i < n; ++i) {
    bool fresh = false;
    uint32_t g =
        table.find_or_insert(hashes[i], codes.data() + i * k, k, rep_words,
                             uint32_t(gt.rep_rows.size()), &fresh);
    if (fresh) gt.rep_rows.push_back(uint32_t(i));
    gt.row_to_group[i] = g;
  }
  gt.n_groups = uint32_t(gt.rep_rows.size());
  return gt;
}

GroupTable build_groups(const Frame& f, const std::vector<std::string>& keys,
                        const GroupOptions& opt) {
  return opt.strategy == GroupStrategy::Transposed
             ? group_rows(f, keys, opt)
             : group_rows_incremental(f, keys, opt);
}

/* ---------------- aggregation ---------------- */

namespace {

const char* agg_name(AggFn fn) {
  switch (fn) {
    case AggFn::Sum: return "sum";
    case AggFn::Count: return "count";
    case AggFn::Mean: return "mean";
    case AggFn::Min: return "min";
    case AggFn::Max: return "max";
    case AggFn::CountDistinct: return "count_distinct";
  }
  return "?";
}

bool is_string_class(LogicalDtype d) {
  return d == LogicalDtype::DictCode || d == LogicalDtype::RawString;
}

struct AggOutput {
  LogicalDtype dtype{};
  std::vector<Cell64> cells;            // block output
  std::vector<std::string> strs;        // string output (min/max on strings)
  bool is_string = false;
};

AggOutput run_agg(const Frame& f, const GroupTable& gt, const AggItem& item) {
  ColumnView c = f.column(f.column_pos(item.column));
  const size_t n = f.n_rows();
  const size_t g = gt.n_groups;
  const LogicalDtype dt = c.dtype();
  AggOutput out;

  auto group_of = [&](size_t i) { return gt.row_to_group[i]; };

  switch (item.fn) {
    case AggFn::Count: {
      std::vector<int64_t> cnt(g, 0);
      for (size_t i = 0; i < n; ++i) cnt[group_of(i)]++;
      out.dtype = LogicalDtype::Int64;
      out.cells.resize(g);
      for (size_t j = 0; j < g; ++j) out.cells[j] = std::bit_cast<Cell64>(cnt[j]);
      return out;
    }
    case AggFn::Sum:
    case AggFn::Mean: {
      if (dt != LogicalDtype::Int64 && dt != LogicalDtype::Float64)
        throw AggError(std::string(agg_name(item.fn)) + " needs a numeric column: " +
                       item.column);
      if (item.fn == AggFn::Sum && dt == LogicalDtype::Int64) {
        std::vector<int64_t> acc(g, 0);
        for (size_t i = 0; i < n; ++i) {
          int64_t v = c.i64(i);
          int64_t* slot = &acc[group_of(i)];
          if (__builtin_add_overflow(*slot, v, slot))
            throw OverflowError("int64 sum overflow in column " + item.column);
        }
        out.dtype = LogicalDtype::Int64;
        out.cells.resize(g);
        for (size_t j = 0; j < g; ++j) out.cells[j] = std::bit_cast<Cell64>(acc[j]);
        return out;
      }
      // Accumulation runs in logical row order; totals are reproducible
      // bit for bit.
      std::vector<double> acc(g, 0.0);
      std::vector<int64_t> cnt(g, 0);
      if (dt == LogicalDtype::Float64) {
        for (size_t i = 0; i < n; ++i) {
          uint32_t grp = group_of(i);
          acc[grp] += c.f64(i);
          cnt[grp]++;
        }
      } else {
        for (size_t i = 0; i < n; ++i) {
          uint32_t grp = group_of(i);
          acc[grp] += double(c.i64(i));
          cnt[grp]++;
        }
      }
      out.dtype = LogicalDtype::Float64;
      out.cells.resize(g);
      if (item.fn == AggFn::Sum) {
        for (size_t j = 0; j < g; ++j) out.cells[j] = std::bit_cast<Cell64>(acc[j]);
      } else {  // mean = sum / count at finalization
        for (size_t j = 0; j < g; ++j)
          out.cells[j] = std::bit_cast<Cell64>(acc[j] / double(cnt[j]));
      }
      return out;
    }
    case AggFn::Min:
    case AggFn::Max: {
      const bool want_min = item.fn == AggFn::Min;
      if (is_string_class(dt)) {
        std::vector<std::string_view> best(g);
        std::vector<uint8_t> seen(g, 0);
        for (size_t i = 0; i < n; ++i) {
          uint32_t grp = group_of(i);
          std::string_view v = c.str(i);
          if (!seen[grp] || (want_min ? v < best[grp] : v > best[grp])) {
            best[grp] = v;
            seen[grp] = 1;
          }
        }
        out.is_string = true;
        out.strs.assign(best.begin(), best.end());
        return out;
      }
      if (dt == LogicalDtype::Float64) {
        std::vector<double> best(g);
        std::vector<uint8_t> seen(g, 0);
        for (size_t i = 0; i < n; ++i) {
          uint32_t grp = group_of(i);
          double v = c.f64(i);
          if (!seen[grp] || (want_min ? v < best[grp] : v > best[grp])) {
            best[grp] = v;
            seen[grp] = 1;
          }
        }
        out.dtype = LogicalDtype::Float64;
        out.cells.resize(g);
        for (size_t j = 0; j < g; ++j) out.cells[j] = std::bit_cast<Cell64>(best[j]);
        return out;
      }
      std::vector<int64_t> best(g);
      std::vector<uint8_t> seen(g, 0);
      for (size_t i = 0; i < n; ++i) {
        uint32_t grp = group_of(i);
        int64_t v = c.i64(i);
        if (!seen[grp] || (want_min ? v < best[grp] : v > best[grp])) {
          best[grp] = v;
          seen[grp] = 1;
        }
      }
      out.dtype = dt;  // Int64 stays Int64, Date stays Date
      out.cells.resize(g);
      for (size_t j = 0; j < g; ++j) out.cells[j] = std::bit_cast<Cell64>(best[j]);
      return out;
    }
    case AggFn::CountDistinct: {
      std::vector<int64_t> cnt(g, 0);
      if (is_string_class(dt)) {
        std::vector<std::unordered_set<std::string_view>> sets(g);
        for (size_t i = 0; i < n; ++i)
          if (sets[group_of(i)].insert(c.str(i)).second) cnt[group_of(i)]++;
      } else if (dt == LogicalDtype::Float64) {
        std::vector<std::unordered_set<uint64_t>> sets(g);
        for (size_t i = 0; i < n; ++i) {
          double v = c.f64(i);
          if (v == 0.0) v = 0.0;  // fold -0.0 into +0.0
          if (sets[group_of(i)].insert(std::bit_cast<uint64_t>(v)).second)
            cnt[group_of(i)]++;
        }
      } else {
        std::vector<std::unordered_set<int64_t>> sets(g);
        for (size_t i = 0; i < n; ++i)
          if (sets[group_of(i)].insert(c.i64(i)).second) cnt[group_of(i)]++;
      }
      out.dtype = LogicalDtype::Int64;
      out.cells.resize(g);
      for (size_t j = 0; j < g; ++j) out.cells[j] = std::bit_cast<Cell64>(cnt[j]);
      return out;
    }
  }
  throw AggError("unknown aggregate function");
}

}  // namespace

Frame aggregate(const Frame& f, const std::vector<std::string>& keys,
                const GroupTable& gt, const AggSpec& spec) {
  if (gt.row_to_group.size() != f.n_rows())
    throw Error("group table does not cover the frame");
  const size_t g = gt.n_groups;

  // Aggregates run independently per item (parallel across items); key
  // columns are decoded through each group's first-occurrence row.
  std::vector<AggOutput> outputs(spec.size());
  for_each_chunk(spec.size(), 1, [&](size_t j, size_t, size_t) {
    outputs[j] = run_agg(f, gt, spec[j]);
  });

  FrameBuilder b(g);
  for (const auto& key : keys) {
    ColumnView c = f.column(f.column_pos(key));
    if (is_string_class(c.dtype())) {
      std::vector<std::string> vals(g);
      for (size_t j = 0; j < g; ++j) vals[j] = std::string(c.str(gt.rep_rows[j]));
      add_string_auto(b, key, vals);
    } else {
      std::vector<Cell64> cells(g);
      for (size_t j = 0; j < g; ++j) cells[j] = c.raw(gt.rep_rows[j]);
      b.add_cells(key, c.dtype(), std::move(cells));
    }
  }
  for (size_t j = 0; j < spec.size(); ++j) {
    AggOutput& out = outputs[j];
    if (out.is_string)
      add_string_auto(b, spec[j].out_name, out.strs);
    else
      b.add_cells(spec[j].out_name, out.dtype, std::move(out.cells));
  }
  return b.build();
}

Frame group_by(const Frame& f, const std::vector<std::string>& keys,
               const AggSpec& spec, const GroupOptions& opt) {
  return aggregate(f, keys, build_groups(f, keys, opt), spec);
}

}  // namespace cardframe
