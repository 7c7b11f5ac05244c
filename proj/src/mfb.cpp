#include "cardframe/mfb.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace cardframe {

static_assert(std::endian::native == std::endian::little,
              "MFB I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'M', 'F', 'B', '1'};
constexpr uint32_t kVersion = 1;
constexpr size_t kEntryFixedBytes = 1 + 4 * 8;  // dtype + four u64 fields

uint64_t block_payload_len(uint64_t n) { return n * 8; }
uint64_t pool_payload_len(const StringPool& p) {
  return (p.size() + 1) * 8 + p.byte_size();
}
uint64_t dict_aux_len(const Dictionary& d) {
  return 8 + (d.size() + 1) * 8 + d.value_bytes();
}

struct Writer {
  std::ofstream out;
  explicit Writer(const std::string& path)
      : out(path, std::ios::binary | std::ios::trunc) {
    if (!out) throw Error("cannot open for writing: " + path);
  }
  void bytes(const void* p, size_t n) { out.write(static_cast<const char*>(p), n); }
  void u16(uint16_t v) { bytes(&v, 2); }
  void u32(uint32_t v) { bytes(&v, 4); }
  void u64(uint64_t v) { bytes(&v, 8); }
  void str(std::string_view s) { bytes(s.data(), s.size()); }
};

struct Reader {
  std::ifstream in;
  uint64_t file_size = 0;
  uint64_t pos = 0;
  std::string path;

  explicit Reader(const std::string& p) : path(p) {
    in.rdbuf()->pubsetbuf(nullptr, 0);  // no readahead: only requested ranges
    in.open(p, std::ios::binary);
    if (!in) throw FormatError("cannot open: " + p);
    in.seekg(0, std::ios::end);
    file_size = uint64_t(in.tellg());
    in.seekg(0);
  }
  void bytes(void* out, size_t n) {
    in.read(static_cast<char*>(out), std::streamsize(n));
    if (in.gcount() != std::streamsize(n))
      throw FormatError("truncated file: " + path);
    pos += n;
  }
  void seek(uint64_t offset) {
    if (offset > file_size) throw FormatError("offset past end: " + path);
    in.clear();
    in.seekg(std::streamoff(offset));
    pos = offset;
  }
  uint16_t u16() { uint16_t v; bytes(&v, 2); return v; }
  uint32_t u32() { uint32_t v; bytes(&v, 4); return v; }
  uint64_t u64() { uint64_t v; bytes(&v, 8); return v; }
};

LogicalDtype dtype_from_code(uint8_t code, const std::string& path) {
  if (code > 4) throw FormatError("unknown dtype code in " + path);
  return LogicalDtype(code);
}

MfbDirectory parse_directory(Reader& r, IoStats* stats) {
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("bad magic: " + r.path);
  uint32_t version = r.u32();
  if (version != kVersion)
    throw FormatError("unsupported version " + std::to_string(version) + ": " +
                      r.path);
  MfbDirectory dir;
  dir.n_rows = r.u64();
  uint32_t n_cols = r.u32();
  dir.columns.reserve(n_cols);
  for (uint32_t i = 0; i < n_cols; ++i) {
    MfbColumnInfo c;
    uint16_t name_len = r.u16();
    c.name.resize(name_len);
    r.bytes(c.name.data(), name_len);
    uint8_t dtype_code;
    r.bytes(&dtype_code, 1);
    c.dtype = dtype_from_code(dtype_code, r.path);
    c.data_offset = r.u64();
    c.data_len = r.u64();
    c.aux_offset = r.u64();
    c.aux_len = r.u64();
    if (c.data_offset + c.data_len > r.file_size ||
        c.aux_offset + c.aux_len > r.file_size)
      throw FormatError("payload past end of file: " + r.path);
    dir.columns.push_back(std::move(c));
  }
  if (stats) stats->header_bytes = r.pos;
  return dir;
}

std::shared_ptr<std::vector<Cell64>> read_cells(Reader& r, const MfbColumnInfo& c,
                                                uint64_t n_rows) {
  if (c.data_len != block_payload_len(n_rows))
    throw FormatError("block payload length mismatch for column " + c.name);
  auto cells = std::make_shared<std::vector<Cell64>>(n_rows);
  r.seek(c.data_offset);
  if (n_rows) r.bytes(cells->data(), size_t(c.data_len));
  return cells;
}

// RawString-layout region: (count + 1) offsets then the concatenated bytes.
StringPool read_pool_region(Reader& r, uint64_t count, uint64_t region_len,
                            const std::string& what) {
  if (region_len < (count + 1) * 8)
    throw FormatError("string payload too short for " + what);
  StringPool p;
  p.offsets.resize(count + 1);
  r.bytes(p.offsets.data(), size_t((count + 1) * 8));
  uint64_t byte_len = region_len - (count + 1) * 8;
  p.bytes.resize(byte_len);
  if (byte_len) r.bytes(p.bytes.data(), size_t(byte_len));
  if (p.offsets[0] != 0 || p.offsets[count] != byte_len)
    throw FormatError("corrupt string offsets for " + what);
  for (uint64_t i = 0; i < count; ++i)
    if (p.offsets[i] > p.offsets[i + 1])
      throw FormatError("non-monotone string offsets for " + what);
  return p;
}

}  // namespace

void write_mfb(const Frame& frame, const std::string& path) {
  Frame f = frame.materialize();
  const FrameStorage& st = f.storage();
  const uint64_t n = st.n_rows;
  const auto& names = f.names();
  const auto& metas = f.metas();

  for (const auto& name : names)
    if (name.size() > 0xffff) throw Error("column name too long: " + name);

  uint64_t header_len = 4 + 4 + 8 + 4;
  for (const auto& name : names) header_len += 2 + name.size() + kEntryFixedBytes;

  // Payload layout: per column in logical order, data then aux.
  std::vector<MfbColumnInfo> infos(names.size());
  uint64_t cursor = header_len;
  for (size_t j = 0; j < names.size(); ++j) {
    const ColumnMeta& m = metas[j];
    MfbColumnInfo& c = infos[j];
    c.name = names[j];
    c.dtype = m.dtype;
    c.data_offset = cursor;
    if (m.storage == StorageKind::Block) {
      c.data_len = block_payload_len(n);
      cursor += c.data_len;
      if (m.dtype == LogicalDtype::DictCode) {
        const Dictionary& d = *st.dicts[m.dict_id];
        c.aux_offset = cursor;
        c.aux_len = dict_aux_len(d);
        cursor += c.aux_len;
      }
    } else {
      const StringPool& p = *st.pools[m.physical];
      c.data_len = pool_payload_len(p);
      cursor += c.data_len;
    }
  }

  Writer w(path);
  w.bytes(kMagic, 4);
  w.u32(kVersion);
  w.u64(n);
  w.u32(uint32_t(names.size()));
  for (const auto& c : infos) {
    w.u16(uint16_t(c.name.size()));
    w.str(c.name);
    uint8_t code = uint8_t(c.dtype);
    w.bytes(&code, 1);
    w.u64(c.data_offset);
    w.u64(c.data_len);
    w.u64(c.aux_offset);
    w.u64(c.aux_len);
  }
  for (size_t j = 0; j < names.size(); ++j) {
    const ColumnMeta& m = metas[j];
    if (m.storage == StorageKind::Block) {
      const auto& cells = *st.block[m.physical];
      if (n) w.bytes(cells.data(), size_t(n * 8));
      if (m.dtype == LogicalDtype::DictCode) {
        const Dictionary& d = *st.dicts[m.dict_id];
        w.u64(d.size());
        uint64_t off = 0;
        w.u64(off);
        for (const auto& v : d.values) w.u64(off += v.size());
        for (const auto& v : d.values) w.str(v);
      }
    } else {
      const StringPool& p = *st.pools[m.physical];
      w.bytes(p.offsets.data(), (p.size() + 1) * 8);
      w.str(p.bytes);
    }
  }
  w.out.flush();
  if (!w.out) throw Error("write failed: " + path);
}

MfbDirectory read_mfb_directory(const std::string& path, IoStats* stats) {
  Reader r(path);
  return parse_directory(r, stats);
}

ReadResult read_mfb(const std::string& path) {
  Reader r(path);
  MfbDirectory dir = parse_directory(r, nullptr);
  std::vector<std::string> all;
  all.reserve(dir.columns.size());
  for (const auto& c : dir.columns) all.push_back(c.name);
  return read_mfb(path, all);
}

ReadResult read_mfb(const std::string& path,
                    const std::vector<std::string>& columns) {
  Reader r(path);
  IoStats stats;
  MfbDirectory dir = parse_directory(r, &stats);
  const uint64_t n = dir.n_rows;

  auto st = std::make_shared<FrameStorage>();
  st->n_rows = n;
  std::vector<std::string> names;
  std::vector<ColumnMeta> metas;

  for (const auto& want : columns) {
    const MfbColumnInfo* info = nullptr;
    for (const auto& c : dir.columns)
      if (c.name == want) {
        info = &c;
        break;
      }
    if (!info) throw NameError(want);

    ColumnMeta m;
    m.dtype = info->dtype;
    if (info->dtype == LogicalDtype::RawString) {
      if (info->data_len < (n + 1) * 8)
        throw FormatError("string payload length mismatch for column " + want);
      r.seek(info->data_offset);
      StringPool p = read_pool_region(r, n, info->data_len, "column " + want);
      m.storage = StorageKind::Pool;
      m.physical = uint32_t(st->pools.size());
      st->pools.push_back(std::make_shared<StringPool>(std::move(p)));
    } else {
      auto cells = read_cells(r, *info, n);
      m.storage = StorageKind::Block;
      m.physical = uint32_t(st->block.size());
      st->block.push_back(std::move(cells));
      if (info->dtype == LogicalDtype::DictCode) {
        r.seek(info->aux_offset);
        if (info->aux_len < 8)
          throw FormatError("dictionary payload too short for column " + want);
        uint64_t count = r.u64();
        StringPool values =
            read_pool_region(r, count, info->aux_len - 8, "dictionary of " + want);
        std::vector<std::string> vals(count);
        for (uint64_t i = 0; i < count; ++i) vals[i] = std::string(values.at(i));
        Dictionary d;
        try {
          d = Dictionary::from_values(std::move(vals));
        } catch (const CodeError&) {
          throw FormatError("duplicate dictionary value in column " + want);
        }
        m.dict_id = int32_t(st->dicts.size());
        st->dicts.push_back(std::make_shared<Dictionary>(std::move(d)));
      }
    }
    stats.payload_bytes += info->data_len + info->aux_len;
    names.push_back(want);
    metas.push_back(m);
  }

  try {
    ReadResult out{Frame(std::move(st), std::move(names), std::move(metas)),
                   stats};
    return out;
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    // Structural violations inside the payload are file corruption here.
    throw FormatError(std::string("invalid column data: ") + e.what());
  }
}

}  // namespace cardframe
