#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cardframe/frame.hpp"

namespace cardframe {

// MFB: little-endian columnar container.
//   magic "MFB1" | version u32 = 1 | n_rows u64 | n_cols u32
//   directory, one entry per column:
//     name_len u16 | name bytes | dtype u8 | data_offset u64 | data_len u64 |
//     aux_offset u64 | aux_len u64
//   payloads at absolute offsets:
//     block column: n_rows * 8 raw cells
//     RawString:    (n_rows + 1) * 8 offsets, then the concatenated bytes
//     DictCode aux: count u64, (count + 1) * 8 offsets, then value bytes
// dtype codes: 0 Int64, 1 Float64, 2 Date, 3 DictCode, 4 RawString.

struct IoStats {
  uint64_t header_bytes = 0;   // magic/version/shape plus directory
  uint64_t payload_bytes = 0;  // exact data+aux bytes of the columns read
};

struct MfbColumnInfo {
  std::string name;
  LogicalDtype dtype{};
  uint64_t data_offset = 0;
  uint64_t data_len = 0;
  uint64_t aux_offset = 0;
  uint64_t aux_len = 0;
};

struct MfbDirectory {
  uint64_t n_rows = 0;
  std::vector<MfbColumnInfo> columns;
};

struct ReadResult {
  Frame frame;
  IoStats stats;
};

// The encoding verdict is fixed at write time; readers never re-derive it.
void write_mfb(const Frame& f, const std::string& path);

MfbDirectory read_mfb_directory(const std::string& path, IoStats* stats = nullptr);

// Projection pushdown: only the requested columns' byte ranges are read.
ReadResult read_mfb(const std::string& path);
ReadResult read_mfb(const std::string& path, const std::vector<std::string>& columns);

}  // namespace cardframe
