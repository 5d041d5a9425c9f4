#include "cms/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <exception>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include <fmt/format.h>
#include <json.hpp>
#include <omp.h>

#include "cms/errors.hpp"
#include "cms/fileio.hpp"
#include "cms/hash.hpp"
#include "cms/ingest.hpp"

namespace cms {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

void ExperimentConfig::validate() const {
  if (grid.empty()) {
    throw ConfigError("experiment: grid must contain at least one (d, w) cell");
  }
  if (seeds.empty()) {
    throw ConfigError("experiment: at least one seed is required");
  }
  if (flows == 0 || packets == 0 || k == 0) {
    throw ConfigError("experiment: N, packets and k must be >= 1");
  }
  if (!(alpha > 0.0)) {
    throw ConfigError("experiment: alpha must be > 0");
  }
  if (k > flows) {
    throw ConfigError(fmt::format("experiment: k={} exceeds N={}", k, flows));
  }
  for (const Dimensions& d : grid) {
    if (d.depth == 0 || d.width == 0) {
      throw ConfigError("experiment: grid cells need d >= 1 and w >= 1");
    }
  }
  if (out_dir.empty()) {
    throw ConfigError("experiment: output directory must be set");
  }
}

ExperimentConfig fig3_preset() {
  ExperimentConfig c;
  c.flows = 7000;
  c.alpha = 1.1;
  c.packets = kDefaultPackets;
  c.k = 20;
  c.grid.clear();
  for (std::size_t w : {64, 256}) {
    for (std::size_t d : {3, 5, 7}) {
      c.grid.push_back({d, w});
    }
  }
  return c;
}

void apply_preset(ExperimentConfig& config, const std::string& name) {
  if (name != "fig3") {
    throw ConfigError(fmt::format("unknown preset '{}' (known: fig3)", name));
  }
  ExperimentConfig preset = fig3_preset();
  preset.seeds = config.seeds;
  preset.out_dir = config.out_dir;
  config = std::move(preset);
}

// ---- config file ----------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
T parse_value(std::string_view text, std::string_view key) {
  text = trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw ConfigError(fmt::format("config: bad value '{}' for {}", text, key));
  }
  return value;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& in) {
  struct Entry {
    int line;
    std::string key;
    std::string value;
  };
  std::vector<Entry> entries;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("config line {}: expected key=value", line_no));
    }
    entries.push_back({line_no, std::string(trim(line.substr(0, eq))),
                       std::string(trim(line.substr(eq + 1)))});
  }

  // The preset is the base; every other key overrides it regardless of order.
  ExperimentConfig config;
  for (const Entry& e : entries) {
    if (e.key == "preset") {
      apply_preset(config, e.value);
    }
  }
  bool seeds_given = false;
  bool grid_given = false;
  for (const Entry& e : entries) {
    const std::string_view value = e.value;
    if (e.key == "preset") {
      continue;
    } else if (e.key == "N") {
      config.flows = parse_value<std::uint64_t>(value, e.key);
    } else if (e.key == "alpha") {
      config.alpha = parse_value<double>(value, e.key);
    } else if (e.key == "packets") {
      config.packets = parse_value<std::uint64_t>(value, e.key);
    } else if (e.key == "k") {
      config.k = parse_value<std::size_t>(value, e.key);
    } else if (e.key == "out") {
      config.out_dir = e.value;
    } else if (e.key == "seed" || e.key == "seeds") {
      if (!seeds_given) {
        config.seeds.clear();
        seeds_given = true;
      }
      std::string_view rest = value;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        config.seeds.push_back(parse_value<std::uint64_t>(rest.substr(0, comma), e.key));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      }
    } else if (e.key == "grid") {
      if (!grid_given) {
        config.grid.clear();
        grid_given = true;
      }
      const auto comma = value.find(',');
      if (comma == std::string_view::npos) {
        throw ConfigError(fmt::format("config line {}: grid expects <d>,<w>", e.line));
      }
      config.grid.push_back(
          {parse_value<std::size_t>(value.substr(0, comma), "grid depth"),
           parse_value<std::size_t>(value.substr(comma + 1), "grid width")});
    } else {
      throw ConfigError(fmt::format("config line {}: unknown key '{}'", e.line, e.key));
    }
  }
  return config;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open " + path.string());
  }
  return parse_experiment_config(in);
}

// ---- runs -----------------------------------------------------------------

std::uint64_t sketch_seed_for(std::uint64_t seed) { return mix64(seed); }

CellResult evaluate_cell(const Trace& trace, const ExactCounts& oracle,
                         Dimensions dims, std::size_t k, std::uint64_t seed) {
  Sketch sketch({dims.depth, dims.width, sketch_seed_for(seed)});
  TopKTracker tracker(k);
  const auto start = Clock::now();
  for (FlowId id : trace.packets) {
    sketch.update(id);
    tracker.track_update(sketch, id);
  }
  const std::chrono::duration<double> elapsed = Clock::now() - start;

  CellResult cell;
  cell.depth = dims.depth;
  cell.width = dims.width;
  cell.seed = seed;
  cell.report = score(sketch, oracle, k, tracker);
  cell.updates_per_sec = elapsed.count() > 0.0
                             ? static_cast<double>(trace.packets.size()) / elapsed.count()
                             : 0.0;
  cell.memory_bits = memory_bits(dims.depth, dims.width, 64);
  return cell;
}

void write_summary_csv(std::ostream& out, const std::vector<CellResult>& cells) {
  out << "d,w,seed,mean_abs_err,precision,recall,updates_per_sec\n";
  for (const CellResult& c : cells) {
    out << fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.0f}\n", c.depth, c.width,
                       c.seed, c.report.mean_abs_error, c.report.precision,
                       c.report.recall, c.updates_per_sec);
  }
}

RunResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const ZipfModel model(config.flows, config.alpha);

  const std::size_t nseeds = config.seeds.size();
  const std::size_t ncells = config.grid.size();
  std::vector<Trace> traces(nseeds);
  std::vector<ExactCounts> oracles(nseeds);
  std::vector<CellResult> cells(nseeds * ncells);
  std::vector<fs::path> created;
  std::exception_ptr failure;

  std::error_code ec;
  const bool made_dir = fs::create_directories(config.out_dir, ec);
  if (ec) {
    throw ConfigError("cannot create output directory " + config.out_dir.string() +
                      ": " + ec.message());
  }

  const auto n_seeds = static_cast<std::ptrdiff_t>(nseeds);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t s = 0; s < n_seeds; ++s) {
    const auto i = static_cast<std::size_t>(s);
    try {
      traces[i] = generate_trace(model, config.packets, config.seeds[i]);
      oracles[i] = exact_counts(traces[i]);
    } catch (...) {
#pragma omp critical(cms_run_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) {
    if (made_dir) {
      fs::remove(config.out_dir, ec);
    }
    std::rethrow_exception(failure);
  }

  const auto n_jobs = static_cast<std::ptrdiff_t>(nseeds * ncells);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < n_jobs; ++j) {
    const auto job = static_cast<std::size_t>(j);
    const std::size_t si = job / ncells;
    const Dimensions dims = config.grid[job % ncells];
    try {
      CellResult cell =
          evaluate_cell(traces[si], oracles[si], dims, config.k, config.seeds[si]);
      const std::string stem =
          fmt::format("cell_d{}_w{}_seed{}", dims.depth, dims.width, config.seeds[si]);
      cell.report_csv = config.out_dir / (stem + ".csv");
      cell.report_json = config.out_dir / (stem + ".json");
      write_file_atomic(cell.report_csv,
                        [&](std::ostream& out) { write_report_csv(out, cell.report); });
#pragma omp critical(cms_run_created)
      created.push_back(cell.report_csv);
      write_file_atomic(cell.report_json,
                        [&](std::ostream& out) { write_report_json(out, cell.report); });
#pragma omp critical(cms_run_created)
      created.push_back(cell.report_json);
      cells[job] = std::move(cell);
    } catch (...) {
#pragma omp critical(cms_run_failure)
      if (!failure) failure = std::current_exception();
    }
  }

  RunResult result;
  result.summary_csv = config.out_dir / "summary.csv";
  if (!failure) {
    try {
      write_file_atomic(result.summary_csv,
                        [&](std::ostream& out) { write_summary_csv(out, cells); });
    } catch (...) {
      failure = std::current_exception();
    }
  }
  if (failure) {
    for (const fs::path& p : created) {
      fs::remove(p, ec);
    }
    if (made_dir) {
      fs::remove(config.out_dir, ec);  // only succeeds if now empty
    }
    std::rethrow_exception(failure);
  }
  result.cells = std::move(cells);
  return result;
}

// ---- bench ----------------------------------------------------------------

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <typename F>
double time_updates_per_sec(std::uint64_t packets, F&& body) {
  const auto start = Clock::now();
  body();
  const std::chrono::duration<double> elapsed = Clock::now() - start;
  return static_cast<double>(packets) / std::max(elapsed.count(), 1e-12);
}

}  // namespace

BenchResult run_bench(const BenchConfig& config) {
  if (config.depth == 0 || config.width == 0) {
    throw ConfigError("bench: d and w must be >= 1");
  }
  if (config.packets == 0) {
    throw ConfigError("bench: packets must be >= 1");
  }
  if (config.repetitions < 1) {
    throw ConfigError("bench: at least one repetition is required");
  }
  const ZipfModel model(kDefaultFlows, kDefaultAlpha);
  const Trace trace = generate_trace(model, config.packets, config.seed);
  const SketchConfig sketch_config{config.depth, config.width,
                                   sketch_seed_for(config.seed)};

  BenchResult result;
  result.config = config;
  result.threads_used = config.threads > 0 ? config.threads : omp_get_max_threads();
  Counter sink = 0;
  for (int r = 0; r < config.repetitions; ++r) {
    result.serial_samples.push_back(time_updates_per_sec(config.packets, [&] {
      sink += ingest_serial(sketch_config, trace.packets).query(1);
    }));
    result.parallel_samples.push_back(time_updates_per_sec(config.packets, [&] {
      sink += ingest_parallel(sketch_config, trace.packets, config.threads).query(1);
    }));
  }
  if (sink == 0) {
    // Flow 1 is always present in a non-empty Zipf trace.
    throw std::logic_error("bench: sketch lost every update");
  }
  result.serial_median = median(result.serial_samples);
  result.parallel_median = median(result.parallel_samples);
  for (const PublishedRate& cell : published_rates()) {
    result.headroom.push_back({cell, result.serial_median / cell.packet_rate});
  }
  return result;
}

void write_bench_text(std::ostream& out, const BenchResult& r) {
  out << fmt::format("sketch d={} w={}  packets={}  seed={}  repetitions={}\n",
                     r.config.depth, r.config.width, r.config.packets, r.config.seed,
                     r.config.repetitions);
  out << fmt::format("serial   median {:.3f} M updates/s\n", r.serial_median / 1e6);
  out << fmt::format("parallel median {:.3f} M updates/s ({} threads)\n",
                     r.parallel_median / 1e6, r.threads_used);
  out << "\nline rate  load  published packet rate  headroom (serial)\n";
  for (const HeadroomRow& row : r.headroom) {
    out << fmt::format("{:>5.0f} Gb/s  {:>3.0f}%  {:>11.2f} M packet/s  {:>8.2f}x\n",
                       row.published.line_rate_bps / 1e9, row.published.load * 100.0,
                       row.published.packet_rate / 1e6, row.headroom);
  }
}

void write_bench_json(std::ostream& out, const BenchResult& r) {
  nlohmann::ordered_json j;
  j["d"] = r.config.depth;
  j["w"] = r.config.width;
  j["packets"] = r.config.packets;
  j["seed"] = r.config.seed;
  j["repetitions"] = r.config.repetitions;
  j["threads"] = r.threads_used;
  j["serial_updates_per_sec"] = r.serial_samples;
  j["parallel_updates_per_sec"] = r.parallel_samples;
  j["serial_median_updates_per_sec"] = r.serial_median;
  j["parallel_median_updates_per_sec"] = r.parallel_median;
  auto& rows = j["published_comparison"] = nlohmann::ordered_json::array();
  for (const HeadroomRow& row : r.headroom) {
    rows.push_back({{"line_rate_bps", row.published.line_rate_bps},
                    {"load", row.published.load},
                    {"packet_rate", row.published.packet_rate},
                    {"headroom", row.headroom}});
  }
  out << j.dump(2) << '\n';
}

}  // namespace cms
