#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cardframe {

// Deterministic TPC-H-shaped generator for desk-scale experiments. Each table
// is written three ways into out_dir: <table>.csv ('|' delimited),
// <table>.schema.json sidecar, <table>.mfb. Same (scale, seed) gives
// byte-identical files. Foreign keys are referentially valid; lineitem
// (partkey, suppkey) pairs always exist in partsupp.
struct GenTable {
  std::string name;
  uint64_t rows = 0;
  std::string csv_path;
  std::string schema_path;
  std::string mfb_path;
  uint64_t csv_hash = 0;  // content digests of the written files
  uint64_t mfb_hash = 0;
};

struct GenManifest {
  double scale = 0;
  uint64_t seed = 0;
  std::vector<GenTable> tables;
};

// Also writes manifest.json into out_dir.
GenManifest gen_tpch_mini(double scale, uint64_t seed, const std::string& out_dir);

}  // namespace cardframe
