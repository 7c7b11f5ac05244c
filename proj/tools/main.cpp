// cardframe command line: data generation, CSV conversion, catalog query
// execution, and benchmarking. JSON reports on stdout, diagnostics on stderr.
//
// Exit codes: 0 success; 2 usage errors, unknown query ids, missing input
// files; 3 data errors during execution (unknown column, malformed file or
// text); 4 result-hash divergence across benchmark cells; 1 anything else.

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cardframe/csv.hpp"
#include "cardframe/queries.hpp"
#include "cardframe/tpch_gen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cardframe;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitHashDiverged = 4;

std::string hex64(uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

// scale/seed are echoed into reports when the data directory has a generator
// manifest; absent one they are simply omitted.
void attach_manifest_info(const std::string& data_dir, json& report) {
  std::ifstream in(fs::path(data_dir) / "manifest.json");
  if (!in) return;
  try {
    json m = json::parse(in);
    if (m.contains("scale")) report["scale"] = m["scale"];
    if (m.contains("seed")) report["seed"] = m["seed"];
  } catch (const json::exception&) {
    // not a generator directory; nothing to attach
  }
}

int cmd_gen(double scale, uint64_t seed, const std::string& out_dir) {
  GenManifest m = gen_tpch_mini(scale, seed, out_dir);
  json tables = json::array();
  for (const auto& t : m.tables)
    tables.push_back({{"name", t.name},
                      {"rows", t.rows},
                      {"csv", t.csv_path},
                      {"mfb", t.mfb_path},
                      {"csv_hash", hex64(t.csv_hash)},
                      {"mfb_hash", hex64(t.mfb_hash)}});
  json report{{"command", "gen"},
              {"scale", m.scale},
              {"seed", m.seed},
              {"out", out_dir},
              {"tables", tables}};
  std::cout << report.dump(2) << '\n';
  return kExitOk;
}

int cmd_convert(const std::string& csv_dir, const std::string& schema_dir,
                const std::string& out_dir) {
  std::vector<fs::path> csvs;
  for (const auto& entry : fs::directory_iterator(csv_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      csvs.push_back(entry.path());
  std::sort(csvs.begin(), csvs.end());
  if (csvs.empty()) {
    std::cerr << "no .csv files in " << csv_dir << "\n";
    return kExitUsage;
  }
  fs::create_directories(out_dir);

  json tables = json::array();
  for (const auto& csv : csvs) {
    std::string stem = csv.stem().string();
    fs::path schema_path = fs::path(schema_dir) / (stem + ".schema.json");
    if (!fs::exists(schema_path)) {
      std::cerr << "missing schema file: " << schema_path.string() << "\n";
      return kExitUsage;
    }
    CsvSchema schema = load_schema(schema_path.string());
    std::string out_path = (fs::path(out_dir) / (stem + ".mfb")).string();
    ConvertReport rep = csv_to_mfb(csv.string(), schema, out_path);

    json cols = json::array();
    for (const auto& c : rep.columns)
      cols.push_back({{"name", c.name},
                      {"dtype", dtype_name(c.dtype)},
                      {"n_distinct", c.n_distinct},
                      {"cardinality_ratio", c.cardinality_ratio},
                      {"data_bytes", c.data_bytes},
                      {"aux_bytes", c.aux_bytes}});
    tables.push_back({{"name", stem},
                      {"rows", rep.n_rows},
                      {"out", out_path},
                      {"columns", cols}});
  }
  json report{{"command", "convert"}, {"out", out_dir}, {"tables", tables}};
  std::cout << report.dump(2) << '\n';
  return kExitOk;
}

int check_data_dir(const std::string& data_dir, const std::string& id) {
  for (const auto& [table, cols] : query_columns(id)) {
    fs::path p = fs::path(data_dir) / (table + ".mfb");
    if (!fs::exists(p)) {
      std::cerr << "missing input file: " << p.string() << "\n";
      return kExitUsage;
    }
  }
  return kExitOk;
}

json run_report(const QueryRun& run, const QueryOptions& opt) {
  return json{{"query", run.query},
              {"threads", opt.threads},
              {"groupby",
               opt.groupby == GroupStrategy::Transposed ? "transposed"
                                                        : "incremental"},
              {"join", opt.join == JoinAlgo::Hash ? "hash" : "sortmerge"},
              {"load_ms", run.load_ms},
              {"compute_ms", run.compute_ms},
              {"io_header_bytes", run.io.header_bytes},
              {"io_payload_bytes", run.io.payload_bytes},
              {"rows", run.result.n_rows()},
              {"content_hash", hex64(run.content_hash)}};
}

int cmd_query(const std::string& data_dir, const std::string& id,
              const QueryOptions& opt, const std::string& format) {
  if (!is_catalog_query(id)) {
    std::cerr << "unknown query id: " << id << "\n";
    return kExitUsage;
  }
  if (int rc = check_data_dir(data_dir, id)) return rc;
  QueryRun run = run_query(id, data_dir, opt);
  json report = run_report(run, opt);
  attach_manifest_info(data_dir, report);
  if (format == "table") std::cout << format_table(run.result);
  std::cout << report.dump(2) << '\n';
  return kExitOk;
}

int cmd_bench(const std::string& data_dir, std::vector<std::string> ids,
              std::vector<int> threads_list, int repeats) {
  if (ids.empty()) ids = catalog_query_ids();
  if (threads_list.empty()) threads_list = {1};
  if (repeats < 1) {
    std::cerr << "--repeats must be >= 1\n";
    return kExitUsage;
  }
  for (const auto& id : ids) {
    if (!is_catalog_query(id)) {
      std::cerr << "unknown query id: " << id << "\n";
      return kExitUsage;
    }
    if (int rc = check_data_dir(data_dir, id)) return rc;
  }

  const GroupStrategy groupbys[] = {GroupStrategy::Transposed,
                                    GroupStrategy::Incremental};
  const JoinAlgo joins[] = {JoinAlgo::Hash, JoinAlgo::SortMerge};

  for (const auto& id : ids) {
    bool have_hash = false;
    uint64_t expect_hash = 0;
    for (int threads : threads_list) {
      for (GroupStrategy gs : groupbys) {
        for (JoinAlgo ja : joins) {
          QueryOptions opt;
          opt.threads = threads;
          opt.groupby = gs;
          opt.join = ja;

          json per_run = json::array();
          double load_total = 0, compute_total = 0;
          uint64_t cell_hash = 0;
          uint64_t rows = 0;
          for (int rep = 0; rep < repeats; ++rep) {
            QueryRun run = run_query(id, data_dir, opt);
            if (!have_hash) {
              expect_hash = run.content_hash;
              have_hash = true;
            } else if (run.content_hash != expect_hash) {
              std::cerr << "content hash diverged for " << id << ": expected "
                        << hex64(expect_hash) << ", got "
                        << hex64(run.content_hash) << " (threads=" << threads
                        << ", groupby="
                        << (gs == GroupStrategy::Transposed ? "transposed"
                                                            : "incremental")
                        << ", join="
                        << (ja == JoinAlgo::Hash ? "hash" : "sortmerge")
                        << ")\n";
              return kExitHashDiverged;
            }
            cell_hash = run.content_hash;
            rows = run.result.n_rows();
            load_total += run.load_ms;
            compute_total += run.compute_ms;
            per_run.push_back(
                {{"load_ms", run.load_ms}, {"compute_ms", run.compute_ms}});
          }
          json cell{{"query", id},
                    {"threads", threads},
                    {"groupby", gs == GroupStrategy::Transposed
                                    ? "transposed"
                                    : "incremental"},
                    {"join", ja == JoinAlgo::Hash ? "hash" : "sortmerge"},
                    {"repeats", repeats},
                    {"mean_load_ms", load_total / repeats},
                    {"mean_compute_ms", compute_total / repeats},
                    {"rows", rows},
                    {"content_hash", hex64(cell_hash)},
                    {"runs", per_run}};
          attach_manifest_info(data_dir, cell);
          std::cout << cell.dump() << '\n';  // one JSON line per cell
        }
      }
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cardframe: cardinality-aware columnar query engine"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate the sample table set");
  double scale = 0.01;
  uint64_t seed = 42;
  std::string out_dir;
  gen->add_option("--scale", scale, "size multiplier (0.001 is about 1 MB)")
      ->required();
  gen->add_option("--seed", seed, "generator seed")->required();
  gen->add_option("--out", out_dir, "output directory")->required();

  // convert
  auto* convert =
      app.add_subcommand("convert", "convert CSV tables to MFB files");
  std::string csv_dir, schema_dir, conv_out;
  convert->add_option("--csv", csv_dir, "directory of .csv files")->required();
  convert->add_option("--schema", schema_dir,
                      "directory of .schema.json sidecars")
      ->required();
  convert->add_option("--out", conv_out, "output directory")->required();

  // query
  auto* query = app.add_subcommand("query", "run one catalog query");
  std::string data_dir, query_id, groupby_mode = "transposed",
                        join_mode = "hash", format = "json";
  int threads = 1;
  query->add_option("--data", data_dir, "directory of .mfb tables")->required();
  query->add_option("--id", query_id, "query id (q1 q3 q5 q6 q9 q13)")
      ->required();
  query->add_option("--threads", threads, "thread budget");
  query->add_option("--groupby", groupby_mode, "transposed|incremental")
      ->check(CLI::IsMember({"transposed", "incremental"}));
  query->add_option("--join", join_mode, "hash|sortmerge")
      ->check(CLI::IsMember({"hash", "sortmerge"}));
  query->add_option("--format", format, "json|table")
      ->check(CLI::IsMember({"json", "table"}));

  // bench
  auto* bench = app.add_subcommand("bench", "benchmark catalog queries");
  std::string bench_data;
  std::vector<std::string> bench_ids;
  std::vector<int> bench_threads;
  int repeats = 5;
  bench->add_option("--data", bench_data, "directory of .mfb tables")
      ->required();
  bench->add_option("--ids", bench_ids, "query ids (default: all)")
      ->delimiter(',');
  bench->add_option("--threads", bench_threads, "thread counts (default: 1)")
      ->delimiter(',');
  bench->add_option("--repeats", repeats, "runs per cell (default: 5)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(scale, seed, out_dir);
    if (convert->parsed()) return cmd_convert(csv_dir, schema_dir, conv_out);
    if (query->parsed()) {
      QueryOptions opt;
      opt.threads = threads;
      opt.groupby = groupby_mode == "incremental" ? GroupStrategy::Incremental
                                                  : GroupStrategy::Transposed;
      opt.join = join_mode == "sortmerge" ? JoinAlgo::SortMerge : JoinAlgo::Hash;
      return cmd_query(data_dir, query_id, opt, format);
    }
    if (bench->parsed())
      return cmd_bench(bench_data, bench_ids, bench_threads, repeats);
  } catch (const NameError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitUsage;
}
