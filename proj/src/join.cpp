#include "cardframe/join.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "cardframe/encoding.hpp"
#include "cardframe/parallel.hpp"

namespace cardframe {

namespace {

bool integer_class(LogicalDtype d) {
  return d == LogicalDtype::Int64 || d == LogicalDtype::Date;
}
bool string_class(LogicalDtype d) {
  return d == LogicalDtype::DictCode || d == LogicalDtype::RawString;
}

// Per-side key words in logical row order. String key pairs are factorized
// over the union of both sides, so equal values share a code across sides;
// numeric keys contribute raw cells. Float64 keys match by bit pattern.
struct KeyWords {
  size_t k = 0;
  std::vector<uint64_t> left;   // n_l * k row-major
  std::vector<uint64_t> right;  // n_r * k row-major
};

KeyWords build_key_words(const Frame& l, const Frame& r, const JoinKeys& keys) {
  if (keys.empty()) throw JoinError("join needs at least one key pair");
  KeyWords kw;
  kw.k = keys.size();
  const size_t nl = l.n_rows(), nr = r.n_rows();
  kw.left.resize(nl * kw.k);
  kw.right.resize(nr * kw.k);

  for (size_t j = 0; j < kw.k; ++j) {
    ColumnView lc = l.column(l.column_pos(keys[j].first));
    ColumnView rc = r.column(r.column_pos(keys[j].second));
    LogicalDtype ld = lc.dtype(), rd = rc.dtype();

    if (string_class(ld) && string_class(rd)) {
      auto lv = collect_str(l, lc.logical_pos);
      auto rv = collect_str(r, rc.logical_pos);
      FactorizePairResult fp = factorize_pair(lv, rv);
      for (size_t i = 0; i < nl; ++i) kw.left[i * kw.k + j] = uint64_t(fp.left[i]);
      for (size_t i = 0; i < nr; ++i)
        kw.right[i * kw.k + j] = uint64_t(fp.right[i]);
      continue;
    }
    bool both_int = integer_class(ld) && integer_class(rd);
    bool both_f64 = ld == LogicalDtype::Float64 && rd == LogicalDtype::Float64;
    if (!both_int && !both_f64)
      throw JoinError("incompatible key pair: " + keys[j].first + " (" +
                      dtype_name(ld) + ") vs " + keys[j].second + " (" +
                      dtype_name(rd) + ")");
    for_each_chunk(nl, 0, [&](size_t, size_t b, size_t e) {
      for (size_t i = b; i < e; ++i) kw.left[i * kw.k + j] = lc.raw(i);
    });
    for_each_chunk(nr, 0, [&](size_t, size_t b, size_t e) {
      for (size_t i = b; i < e; ++i) kw.right[i * kw.k + j] = rc.raw(i);
    });
  }
  return kw;
}

bool words_equal(const uint64_t* a, const uint64_t* b, size_t k) {
  for (size_t j = 0; j < k; ++j)
    if (a[j] != b[j]) return false;
  return true;
}

// hash -> build rows holding that hash, in ascending logical order.
struct BuildTable {
  std::unordered_map<uint64_t, std::vector<uint32_t>> buckets;
  const std::vector<uint64_t>* words = nullptr;
  size_t k = 0;

  void build(const std::vector<uint64_t>& w, size_t arity, const HashSpec& h,
             size_t n) {
    words = &w;
    k = arity;
    buckets.reserve(n);
    for (size_t i = 0; i < n; ++i)
      buckets[h.words({w.data() + i * arity, arity})].push_back(uint32_t(i));
  }

  // Matching build rows for one probe key, ascending; empty when none.
  void probe(const uint64_t* key, uint64_t hash, std::vector<uint32_t>& out) const {
    out.clear();
    auto it = buckets.find(hash);
    if (it == buckets.end()) return;
    for (uint32_t c : it->second)
      if (words_equal(key, words->data() + size_t(c) * k, k)) out.push_back(c);
  }
};

// Logical-position pairs, left-major (left asc, then right asc).
struct PairList {
  std::vector<uint32_t> left;
  std::vector<uint32_t> right;
};

PairList hash_join_pairs(const KeyWords& kw, size_t nl, size_t nr,
                         const JoinOptions& opt) {
  bool build_left;
  switch (opt.build) {
    case BuildSide::Left: build_left = true; break;
    case BuildSide::Right: build_left = false; break;
    default: build_left = nl < nr; break;  // tie goes Right
  }

  BuildTable table;
  const auto& build_words = build_left ? kw.left : kw.right;
  const auto& probe_words = build_left ? kw.right : kw.left;
  const size_t n_build = build_left ? nl : nr;
  const size_t n_probe = build_left ? nr : nl;
  table.build(build_words, kw.k, opt.hash, n_build);

  // Probe in chunks, merge per-chunk pair lists in chunk order.
  const size_t n_chunks = chunk_count(n_probe, opt.chunk_size);
  std::vector<PairList> parts(n_chunks);
  for_each_chunk(n_probe, opt.chunk_size, [&](size_t c, size_t b, size_t e) {
    std::vector<uint32_t> matches;
    PairList& out = parts[c];
    for (size_t i = b; i < e; ++i) {
      const uint64_t* key = probe_words.data() + i * kw.k;
      table.probe(key, opt.hash.words({key, kw.k}), matches);
      for (uint32_t m : matches) {
        out.left.push_back(build_left ? m : uint32_t(i));
        out.right.push_back(build_left ? uint32_t(i) : m);
      }
    }
  });

  PairList pairs;
  size_t total = 0;
  for (const auto& p : parts) total += p.left.size();
  pairs.left.reserve(total);
  pairs.right.reserve(total);
  for (const auto& p : parts) {
    pairs.left.insert(pairs.left.end(), p.left.begin(), p.left.end());
    pairs.right.insert(pairs.right.end(), p.right.begin(), p.right.end());
  }

  if (build_left) {
    // Probing left against right yields right-major order; the output
    // contract is left-major, so re-order.
    std::vector<uint32_t> perm(pairs.left.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](uint32_t a, uint32_t b) {
      if (pairs.left[a] != pairs.left[b]) return pairs.left[a] < pairs.left[b];
      return pairs.right[a] < pairs.right[b];
    });
    PairList sorted;
    sorted.left.resize(perm.size());
    sorted.right.resize(perm.size());
    for (size_t i = 0; i < perm.size(); ++i) {
      sorted.left[i] = pairs.left[perm[i]];
      sorted.right[i] = pairs.right[perm[i]];
    }
    return sorted;
  }
  return pairs;
}

PairList sort_merge_pairs(const KeyWords& kw, size_t nl, size_t nr) {
  // Sort each side's logical positions by key words, then walk equal runs.
  auto order_of = [&](const std::vector<uint64_t>& words, size_t n) {
    std::vector<uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
      const uint64_t* wa = words.data() + size_t(a) * kw.k;
      const uint64_t* wb = words.data() + size_t(b) * kw.k;
      for (size_t j = 0; j < kw.k; ++j) {
        if (wa[j] != wb[j]) return wa[j] < wb[j];
      }
      return false;
    });
    return order;
  };
  auto key_less = [&](const uint64_t* a, const uint64_t* b) {
    for (size_t j = 0; j < kw.k; ++j)
      if (a[j] != b[j]) return a[j] < b[j];
    return false;
  };

  std::vector<uint32_t> lo = order_of(kw.left, nl);
  std::vector<uint32_t> ro = order_of(kw.right, nr);

  PairList pairs;
  size_t i = 0, j = 0;
  while (i < nl && j < nr) {
    const uint64_t* ka = kw.left.data() + size_t(lo[i]) * kw.k;
    const uint64_t* kb = kw.right.data() + size_t(ro[j]) * kw.k;
    if (key_less(ka, kb)) {
      ++i;
    } else if (key_less(kb, ka)) {
      ++j;
    } else {
      size_t ie = i, je = j;
      while (ie < nl &&
             words_equal(kw.left.data() + size_t(lo[ie]) * kw.k, ka, kw.k))
        ++ie;
      while (je < nr &&
             words_equal(kw.right.data() + size_t(ro[je]) * kw.k, ka, kw.k))
        ++je;
      for (size_t x = i; x < ie; ++x)
        for (size_t y = j; y < je; ++y) {
          pairs.left.push_back(lo[x]);
          pairs.right.push_back(ro[y]);
        }
      i = ie;
      j = je;
    }
  }

  // Normalize to the inner_join output order (left-major).
  std::vector<uint32_t> perm(pairs.left.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](uint32_t a, uint32_t b) {
    if (pairs.left[a] != pairs.left[b]) return pairs.left[a] < pairs.left[b];
    return pairs.right[a] < pairs.right[b];
  });
  PairList sorted;
  sorted.left.resize(perm.size());
  sorted.right.resize(perm.size());
  for (size_t x = 0; x < perm.size(); ++x) {
    sorted.left[x] = pairs.left[perm[x]];
    sorted.right[x] = pairs.right[perm[x]];
  }
  return sorted;
}

// Combines two identity frames side by side; storage is shared, not copied.
Frame hstack(const Frame& a, const Frame& b) {
  auto st = std::make_shared<FrameStorage>();
  st->n_rows = a.physical_rows();
  const FrameStorage& sa = a.storage();
  const FrameStorage& sb = b.storage();
  st->block = sa.block;
  st->pools = sa.pools;
  st->dicts = sa.dicts;
  st->block.insert(st->block.end(), sb.block.begin(), sb.block.end());
  st->pools.insert(st->pools.end(), sb.pools.begin(), sb.pools.end());
  st->dicts.insert(st->dicts.end(), sb.dicts.begin(), sb.dicts.end());

  std::vector<std::string> names = a.names();
  std::vector<ColumnMeta> metas = a.metas();
  for (size_t j = 0; j < b.n_cols(); ++j) {
    ColumnMeta m = b.metas()[j];
    if (m.storage == StorageKind::Block)
      m.physical += uint32_t(sa.block.size());
    else
      m.physical += uint32_t(sa.pools.size());
    if (m.dict_id >= 0) m.dict_id += int32_t(sa.dicts.size());
    names.push_back(b.names()[j]);
    metas.push_back(m);
  }
  return Frame(std::move(st), std::move(names), std::move(metas));
}

}  // namespace

JoinIndex inner_join_index(const Frame& left, const Frame& right,
                           const JoinKeys& keys, const JoinOptions& opt) {
  KeyWords kw = build_key_words(left, right, keys);
  const size_t nl = left.n_rows(), nr = right.n_rows();
  PairList pairs = opt.algo == JoinAlgo::SortMerge
                       ? sort_merge_pairs(kw, nl, nr)
                       : hash_join_pairs(kw, nl, nr, opt);
  JoinIndex idx;
  idx.left_rows.resize(pairs.left.size());
  idx.right_rows.resize(pairs.right.size());
  for (size_t i = 0; i < pairs.left.size(); ++i) {
    idx.left_rows[i] = left.physical_row(pairs.left[i]);
    idx.right_rows[i] = right.physical_row(pairs.right[i]);
  }
  return idx;
}

Frame inner_join(const Frame& left, const Frame& right, const JoinKeys& keys,
                 const JoinOptions& opt) {
  JoinIndex idx = inner_join_index(left, right, keys, opt);

  // Right key columns are redundant after an equality join.
  std::vector<std::string> right_keep;
  for (const auto& name : right.names()) {
    bool is_key = false;
    for (const auto& [lk, rk] : keys)
      if (name == rk) is_key = true;
    if (!is_key) right_keep.push_back(name);
  }

  Frame lf = left.gather_rows(idx.left_rows);
  Frame rf = right.select_columns(right_keep).gather_rows(idx.right_rows);

  std::vector<std::pair<std::string, std::string>> renames;
  for (const auto& name : right_keep)
    if (lf.has_column(name)) renames.emplace_back(name, name + "_right");
  if (!renames.empty()) rf = rf.renamed(renames);

  return hstack(lf, rf);
}

namespace {

Frame filter_by_match(const Frame& left, const Frame& right, const JoinKeys& keys,
                      const JoinOptions& opt, bool keep_matched) {
  KeyWords kw = build_key_words(left, right, keys);
  const size_t nl = left.n_rows(), nr = right.n_rows();
  BuildTable table;
  table.build(kw.right, kw.k, opt.hash, nr);

  const size_t n_chunks = chunk_count(nl, opt.chunk_size);
  std::vector<std::vector<RowId>> parts(n_chunks);
  for_each_chunk(nl, opt.chunk_size, [&](size_t c, size_t b, size_t e) {
    std::vector<uint32_t> matches;
    for (size_t i = b; i < e; ++i) {
      const uint64_t* key = kw.left.data() + i * kw.k;
      table.probe(key, opt.hash.words({key, kw.k}), matches);
      if (matches.empty() != keep_matched) parts[c].push_back(left.physical_row(i));
    }
  });

  std::vector<RowId> rows;
  for (const auto& p : parts) rows.insert(rows.end(), p.begin(), p.end());
  return left.with_row_index(std::move(rows));
}

}  // namespace

Frame semi_join(const Frame& left, const Frame& right, const JoinKeys& keys,
                const JoinOptions& opt) {
  return filter_by_match(left, right, keys, opt, true);
}

Frame anti_join(const Frame& left, const Frame& right, const JoinKeys& keys,
                const JoinOptions& opt) {
  return filter_by_match(left, right, keys, opt, false);
}

}  // namespace cardframe
