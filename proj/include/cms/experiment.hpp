#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cms/dimensioning.hpp"
#include "cms/heavy_hitter.hpp"

namespace cms {

/// A grid of sketch shapes evaluated over one Zipf trace per seed. Every
/// (d, w) cell of a seed sees the same trace, so cells are paired.
struct ExperimentConfig {
  std::uint64_t flows = kDefaultFlows;
  double alpha = kDefaultAlpha;
  std::uint64_t packets = kDefaultPackets;
  std::vector<std::uint64_t> seeds{kDefaultSeed};
  std::size_t k = 20;
  std::vector<Dimensions> grid;
  std::filesystem::path out_dir = "cms-run";

  /// Throws ConfigError on an empty grid or seed list, non-positive numeric
  /// fields, or k larger than the flow population.
  void validate() const;
};

/// d in {3,5,7} x w in {64,256}, N=7000, alpha=1.1, k=20.
ExperimentConfig fig3_preset();

/// Applies a named preset ("fig3") to `config`, keeping its seeds and output
/// directory. Throws ConfigError for unknown names.
void apply_preset(ExperimentConfig& config, const std::string& name);

/// Flat key=value config: N, alpha, packets, k, out, preset, seed (repeatable
/// or comma separated) and grid=<d>,<w> (repeatable). '#' starts a comment.
/// Throws ConfigError on unknown keys or malformed values.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Master seed of the sketches built for trace seed `seed`. Kept distinct
/// from the trace RNG stream, and shared by every grid cell so sketches of
/// different depth agree on their leading rows.
std::uint64_t sketch_seed_for(std::uint64_t seed);

struct CellResult {
  std::size_t depth = 0;
  std::size_t width = 0;
  std::uint64_t seed = 0;
  HeavyHitterReport report;
  double updates_per_sec = 0.0;
  std::uint64_t memory_bits = 0;  // at 64-bit counters
  std::filesystem::path report_csv;
  std::filesystem::path report_json;
};

struct RunResult {
  std::vector<CellResult> cells;  // seed-major, grid order within a seed
  std::filesystem::path summary_csv;
};

/// Evaluates one cell: ingests the trace with a top-k tracker and scores the
/// tracker's set against the oracle. No files are written.
CellResult evaluate_cell(const Trace& trace, const ExactCounts& oracle,
                         Dimensions dims, std::size_t k, std::uint64_t seed);

/// Runs every grid x seed cell (cells execute in parallel) and writes
///   cell_d<d>_w<w>_seed<s>.csv / .json   per-cell report and aggregates
///   summary.csv                           d,w,seed,mean_abs_err,precision,recall,updates_per_sec
/// into config.out_dir. Files are written atomically; on failure every file
/// this run created is removed before the exception propagates.
RunResult run_experiment(const ExperimentConfig& config);

void write_summary_csv(std::ostream& out, const std::vector<CellResult>& cells);

struct BenchConfig {
  std::size_t depth = 5;
  std::size_t width = 272;
  std::uint64_t packets = kDefaultPackets;
  std::uint64_t seed = kDefaultSeed;
  int repetitions = 5;
  int threads = 0;  // parallel kernel; <= 0 uses the OpenMP default
};

struct HeadroomRow {
  PublishedRate published;
  double headroom = 0.0;  // measured updates/s over the published packet rate
};

struct BenchResult {
  BenchConfig config;
  int threads_used = 1;
  std::vector<double> serial_samples;    // updates/s per repetition
  std::vector<double> parallel_samples;  // updates/s per repetition
  double serial_median = 0.0;
  double parallel_median = 0.0;
  std::vector<HeadroomRow> headroom;  // against serial_median
};

/// Times ingest_serial and ingest_parallel on an in-memory Zipf trace.
/// Throws ConfigError for zero dimensions, zero packets or < 1 repetition.
BenchResult run_bench(const BenchConfig& config);

void write_bench_text(std::ostream& out, const BenchResult& result);
void write_bench_json(std::ostream& out, const BenchResult& result);

}  // namespace cms
