#include "cms/traffic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "cms/errors.hpp"
#include "cms/fileio.hpp"
#include "cms/hash.hpp"

namespace cms {

ZipfModel::ZipfModel(std::size_t n, double alpha) : alpha_(alpha) {
  if (n == 0) {
    throw DomainError("zipf: number of flows must be >= 1");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("zipf: exponent must be a positive finite number");
  }
  freq_.resize(n);
  double norm = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    freq_[k - 1] = std::pow(static_cast<double>(k), -alpha);
    norm += freq_[k - 1];
  }
  cdf_.resize(n);
  double running = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    freq_[k] /= norm;
    running += freq_[k];
    cdf_[k] = running;
  }
  // Rounding can leave the running sum a few ulps short of 1; pin the top so
  // every u in [0, 1) maps to a flow.
  cdf_.back() = 1.0;
}

double ZipfModel::head_mass(std::size_t k) const {
  k = std::min(k, freq_.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sum += freq_[i];
  }
  return sum;
}

FlowId ZipfModel::sample(double u) const noexcept {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = static_cast<std::size_t>(it - cdf_.begin());
  return static_cast<FlowId>(std::min(idx, cdf_.size() - 1) + 1);
}

Trace generate_trace(const ZipfModel& model, std::uint64_t total_packets,
                     std::uint64_t seed) {
  if (total_packets == 0) {
    throw DomainError("trace: total packet count must be >= 1");
  }
  Trace trace;
  trace.header = {model.size(), model.alpha(), total_packets, seed, 1};
  trace.packets.resize(total_packets);
  SplitMix64 rng(seed);
  for (FlowId& id : trace.packets) {
    id = model.sample(rng.next_unit());
  }
  return trace;
}

ExactCounts::ExactCounts(std::span<const FlowId> packets) {
  for (FlowId id : packets) {
    ++counts_[id];
  }
  total_ = packets.size();
}

std::uint64_t ExactCounts::count(FlowId id) const noexcept {
  const auto it = counts_.find(id);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<std::pair<FlowId, std::uint64_t>> ExactCounts::ranked() const {
  std::vector<std::pair<FlowId, std::uint64_t>> out(counts_.begin(),
                                                    counts_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return out;
}

std::vector<std::pair<FlowId, std::uint64_t>> ExactCounts::top_k(
    std::size_t k) const {
  if (k > counts_.size()) {
    throw DomainError(fmt::format(
        "top-{} requested but the trace has only {} distinct flows", k,
        counts_.size()));
  }
  auto out = ranked();
  out.resize(k);
  return out;
}

ExactCounts exact_counts(const Trace& trace) { return ExactCounts(trace.packets); }

std::vector<std::span<const FlowId>> window_stream(std::span<const FlowId> packets,
                                                   std::uint64_t window_packets) {
  if (window_packets == 0) {
    throw DomainError("window size must be >= 1 packet");
  }
  std::vector<std::span<const FlowId>> windows;
  for (std::size_t begin = 0; begin < packets.size(); begin += window_packets) {
    const std::size_t len = std::min<std::size_t>(window_packets, packets.size() - begin);
    windows.push_back(packets.subspan(begin, len));
  }
  return windows;
}

// ---- text format ----------------------------------------------------------

namespace {

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw FormatError(fmt::format("trace: bad {} '{}'", what, text));
  }
  return value;
}

std::string_view take_field(std::string_view& rest, std::string_view key) {
  while (!rest.empty() && rest.front() == ' ') {
    rest.remove_prefix(1);
  }
  if (rest.substr(0, key.size()) != key) {
    throw FormatError(fmt::format("trace: header is missing '{}'", key));
  }
  rest.remove_prefix(key.size());
  const auto space = rest.find(' ');
  const std::string_view value = rest.substr(0, space);
  rest.remove_prefix(space == std::string_view::npos ? rest.size() : space);
  return value;
}

}  // namespace

void write_trace(std::ostream& out, const Trace& trace) {
  const TraceHeader& h = trace.header;
  out << fmt::format("#cms-trace v{} N={} alpha={} packets={} seed={}\n",
                     h.version, h.flows, h.alpha, h.packets, h.seed);
  std::string buf;
  buf.reserve(1 << 16);
  for (FlowId id : trace.packets) {
    fmt::format_to(std::back_inserter(buf), "{}\n", id);
    if (buf.size() > (1 << 16) - 32) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

Trace read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError("trace: empty file");
  }
  std::string_view rest = line;
  if (rest.substr(0, 10) != "#cms-trace") {
    throw FormatError("trace: missing '#cms-trace' header");
  }
  rest.remove_prefix(10);
  Trace trace;
  TraceHeader& h = trace.header;
  const std::string_view version = take_field(rest, "v");
  if (version != "1") {
    throw FormatError(fmt::format("trace: unsupported version v{}", version));
  }
  h.flows = parse_number<std::uint64_t>(take_field(rest, "N="), "N");
  h.alpha = parse_number<double>(take_field(rest, "alpha="), "alpha");
  h.packets = parse_number<std::uint64_t>(take_field(rest, "packets="), "packets");
  h.seed = parse_number<std::uint64_t>(take_field(rest, "seed="), "seed");

  trace.packets.reserve(std::min<std::uint64_t>(h.packets, std::uint64_t{1} << 26));
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const auto id = parse_number<FlowId>(line, "flow id");
    if (id == 0 || id > h.flows) {
      throw FormatError(fmt::format("trace: flow id {} outside [1, {}]", id, h.flows));
    }
    trace.packets.push_back(id);
  }
  if (trace.packets.size() != h.packets) {
    throw FormatError(fmt::format("trace: header declares {} packets, file has {}",
                                  h.packets, trace.packets.size()));
  }
  return trace;
}

void save_trace(const std::filesystem::path& path, const Trace& trace) {
  write_file_atomic(path, [&](std::ostream& out) { write_trace(out, trace); });
}

Trace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError("trace: cannot open " + path.string());
  }
  return read_trace(in);
}

}  // namespace cms
