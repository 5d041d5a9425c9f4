#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "cms/dimensioning.hpp"
#include "cms/errors.hpp"
#include "cms/experiment.hpp"
#include "cms/traffic.hpp"

namespace cms::cli {

namespace {

using Json = nlohmann::ordered_json;

struct DimensionArgs {
  double epsilon = 0.01;
  double delta = 0.01;
  double line_rate_gbps = 100.0;
  double load = 0.4;
  double window_seconds = 0.1;
  std::uint64_t counter_bits = 32;
  double packet_bytes = kAvgPacketBytes;
  double flow_packets = kAvgFlowPackets;
};

Json dimension_report(const DimensionArgs& a) {
  const DimensionSpec spec = dimension_spec({a.epsilon, a.delta}, a.counter_bits);
  const TrafficProfile profile{a.line_rate_gbps * 1e9, a.load, a.packet_bytes,
                               a.flow_packets};
  const RateEstimate rates = rate_estimate(profile);
  if (!(a.window_seconds > 0.0)) {
    throw DomainError("window length must be positive");
  }
  const double window_pkts = rates.packets_per_window(a.window_seconds);
  const ErrorBound bound =
      error_bound(spec.depth, spec.width, static_cast<std::uint64_t>(std::llround(window_pkts)));

  Json j;
  j["epsilon"] = a.epsilon;
  j["delta"] = a.delta;
  j["d"] = spec.depth;
  j["w"] = spec.width;
  j["epsilon_bound"] = bound.epsilon;
  j["delta_bound"] = bound.delta;
  j["counter_bits"] = spec.counter_bits;
  j["memory_bits"] = spec.total_bits;
  j["line_rate_bps"] = profile.line_rate_bps;
  j["load"] = profile.load;
  j["avg_packet_bytes"] = profile.avg_packet_bytes;
  j["avg_flow_packets"] = profile.avg_flow_packets;
  j["packet_rate"] = rates.packet_rate;
  j["flow_rate"] = rates.flow_rate;
  j["window_seconds"] = a.window_seconds;
  j["packets_per_window"] = window_pkts;
  j["flows_per_window"] = rates.flows_per_window(a.window_seconds);
  j["additive_error_bound"] = bound.additive;

  Json flags = Json::array();
  const auto cell = find_published_rate(profile.line_rate_bps, profile.load);
  const bool default_averages =
      profile.avg_packet_bytes == kAvgPacketBytes && profile.avg_flow_packets == kAvgFlowPackets;
  if (cell && default_averages) {
    const RateComparison cmp = compare_with_published(*cell);
    j["published"] = {{"flow_rate", cell->flow_rate},
                      {"packet_rate", cell->packet_rate},
                      {"flow_rate_rel_error", cmp.flow_rate_rel_error},
                      {"packet_rate_rel_error", cmp.packet_rate_rel_error},
                      {"flow_rate_discrepancy", cmp.flow_rate_discrepancy},
                      {"packet_rate_discrepancy", cmp.packet_rate_discrepancy}};
    if (cmp.flow_rate_discrepancy) flags.push_back("paper-discrepancy:flow_rate");
    if (cmp.packet_rate_discrepancy) flags.push_back("paper-discrepancy:packet_rate");
  } else {
    j["published"] = nullptr;
  }
  j["discrepancy_flags"] = flags;
  return j;
}

void print_summary(std::ostream& out, const RunResult& result) {
  out << fmt::format("{:>3} {:>6} {:>6} {:>14} {:>9} {:>9}\n", "d", "w", "seed",
                     "mean_abs_err", "precision", "recall");
  for (const CellResult& c : result.cells) {
    out << fmt::format("{:>3} {:>6} {:>6} {:>14.3f} {:>9.3f} {:>9.3f}\n", c.depth,
                       c.width, c.seed, c.report.mean_abs_error, c.report.precision,
                       c.report.recall);
  }
  out << "summary: " << result.summary_csv.string() << '\n';
}

// "d,w" or "dxw".
Dimensions parse_grid_cell(const std::string& text) {
  const auto sep = text.find_first_of(",x");
  if (sep == std::string::npos) {
    throw ConfigError("grid cell '" + text + "' must look like <d>,<w>");
  }
  try {
    std::size_t used = 0;
    const auto d = std::stoull(text.substr(0, sep), &used);
    if (used != sep) throw std::invalid_argument(text);
    const std::string rest = text.substr(sep + 1);
    const auto w = std::stoull(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(text);
    return {static_cast<std::size_t>(d), static_cast<std::size_t>(w)};
  } catch (const std::logic_error&) {
    throw ConfigError("grid cell '" + text + "' must look like <d>,<w>");
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Count-Min Sketch telemetry toolkit", "cmsctl"};
  app.require_subcommand(1);

  DimensionArgs dim;
  auto* dimension = app.add_subcommand(
      "dimension", "Sketch dimensions, memory and per-port rates for an (epsilon, delta) target");
  dimension->add_option("--epsilon", dim.epsilon, "relative error, in (0,1)")->capture_default_str();
  dimension->add_option("--delta", dim.delta, "failure probability, in (0,1)")->capture_default_str();
  dimension->add_option("--line-rate", dim.line_rate_gbps, "port line rate in Gb/s")->capture_default_str();
  dimension->add_option("--load", dim.load, "port load, in (0,1]")->capture_default_str();
  dimension->add_option("--window", dim.window_seconds, "monitoring window in seconds")->capture_default_str();
  dimension->add_option("--counter-bits", dim.counter_bits, "bits per counter for memory accounting")->capture_default_str();
  dimension->add_option("--packet-bytes", dim.packet_bytes, "average packet size")->capture_default_str();
  dimension->add_option("--flow-packets", dim.flow_packets, "average packets per flow")->capture_default_str();

  std::uint64_t gen_flows = kDefaultFlows;
  double gen_alpha = kDefaultAlpha;
  std::uint64_t gen_packets = kDefaultPackets;
  std::uint64_t gen_seed = kDefaultSeed;
  std::string gen_out = "trace.txt";
  auto* gen = app.add_subcommand("gen-trace", "Write a deterministic Zipf packet trace");
  gen->add_option("-N,--flows", gen_flows, "distinct flows")->capture_default_str();
  gen->add_option("--alpha", gen_alpha, "Zipf exponent")->capture_default_str();
  gen->add_option("--packets", gen_packets, "packets in the trace")->capture_default_str();
  gen->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
  gen->add_option("--out", gen_out, "output path, '-' for stdout")->capture_default_str();

  std::string run_config_path;
  std::string run_preset;
  std::vector<std::uint64_t> run_seeds;
  std::string run_out;
  std::uint64_t run_flows = 0;
  double run_alpha = 0.0;
  std::uint64_t run_packets = 0;
  std::size_t run_k = 0;
  std::vector<std::string> run_grid;
  auto* run = app.add_subcommand("run", "Score top-k accuracy over a grid of sketch shapes");
  run->add_option("--config", run_config_path, "key=value experiment file");
  run->add_option("--preset", run_preset, "named scenario (fig3)");
  auto* opt_seed = run->add_option("--seed", run_seeds, "seed(s); repeatable")->delimiter(',');
  auto* opt_out = run->add_option("--out", run_out, "output directory");
  auto* opt_flows = run->add_option("-N,--flows", run_flows, "distinct flows");
  auto* opt_alpha = run->add_option("--alpha", run_alpha, "Zipf exponent");
  auto* opt_packets = run->add_option("--packets", run_packets, "packets per trace");
  auto* opt_k = run->add_option("-k,--top", run_k, "heavy hitters scored");
  auto* opt_grid = run->add_option("--grid", run_grid, "sketch shape <d>,<w>; repeatable");

  BenchConfig bench_cfg;
  bool bench_json = false;
  auto* bench = app.add_subcommand("bench", "Measure sketch update throughput");
  bench->add_option("-d,--depth", bench_cfg.depth, "rows")->capture_default_str();
  bench->add_option("-w,--width", bench_cfg.width, "columns")->capture_default_str();
  bench->add_option("--packets", bench_cfg.packets, "packets per repetition")->capture_default_str();
  bench->add_option("--seed", bench_cfg.seed, "trace seed")->capture_default_str();
  bench->add_option("--reps", bench_cfg.repetitions, "repetitions (median reported)")->capture_default_str();
  bench->add_option("--threads", bench_cfg.threads, "threads for the parallel kernel");
  bench->add_flag("--json", bench_json, "emit JSON instead of text");

  std::vector<std::string> argv_tail(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(argv_tail.begin(), argv_tail.end());  // CLI11 consumes from the back
  try {
    app.parse(argv_tail);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "cmsctl: " << e.what() << '\n';
    if (!app.get_subcommands().empty()) {
      err << app.get_subcommands().front()->help();
    }
    return kExitUsage;
  }

  try {
    if (*dimension) {
      out << dimension_report(dim).dump(2) << '\n';
    } else if (*gen) {
      const ZipfModel model(gen_flows, gen_alpha);
      const Trace trace = generate_trace(model, gen_packets, gen_seed);
      if (gen_out == "-") {
        write_trace(out, trace);
      } else {
        save_trace(gen_out, trace);
        out << fmt::format("wrote {} packets over {} flows to {}\n", gen_packets,
                           gen_flows, gen_out);
      }
    } else if (*run) {
      ExperimentConfig cfg;
      if (!run_config_path.empty()) {
        cfg = load_experiment_config(run_config_path);
      }
      if (!run_preset.empty()) {
        apply_preset(cfg, run_preset);
      }
      if (opt_seed->count() > 0) cfg.seeds = run_seeds;
      if (opt_out->count() > 0) cfg.out_dir = run_out;
      if (opt_flows->count() > 0) cfg.flows = run_flows;
      if (opt_alpha->count() > 0) cfg.alpha = run_alpha;
      if (opt_packets->count() > 0) cfg.packets = run_packets;
      if (opt_k->count() > 0) cfg.k = run_k;
      if (opt_grid->count() > 0) {
        cfg.grid.clear();
        for (const std::string& cell : run_grid) {
          cfg.grid.push_back(parse_grid_cell(cell));
        }
      }
      print_summary(out, run_experiment(cfg));
    } else if (*bench) {
      const BenchResult result = run_bench(bench_cfg);
      if (bench_json) {
        write_bench_json(out, result);
      } else {
        write_bench_text(out, result);
      }
    }
  } catch (const ConfigError& e) {
    err << "cmsctl: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "cmsctl: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "cmsctl: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "cmsctl: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace cms::cli
