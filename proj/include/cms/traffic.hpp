#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cms/sketch.hpp"

namespace cms {

/// Zipf flow-size law over N flows: flow k (1-based) carries a share
/// k^-alpha / sum_{n=1..N} n^-alpha of all packets. Flow IDs are ranks, so
/// flow 1 is the heaviest in expectation.
class ZipfModel {
 public:
  /// Throws DomainError for n == 0 or alpha <= 0.
  ZipfModel(std::size_t n, double alpha);

  std::size_t size() const noexcept { return freq_.size(); }
  double alpha() const noexcept { return alpha_; }

  /// Share of flow k, 1 <= k <= size().
  double freq(std::size_t k) const { return freq_.at(k - 1); }
  std::span<const double> frequencies() const noexcept { return freq_; }
  std::span<const double> cdf() const noexcept { return cdf_; }

  /// Combined share of the k heaviest flows.
  double head_mass(std::size_t k) const;

  /// Inverse-CDF lookup: smallest flow k with cdf(k) > u, for u in [0, 1).
  FlowId sample(double u) const noexcept;

 private:
  double alpha_;
  std::vector<double> freq_;
  std::vector<double> cdf_;
};

struct TraceHeader {
  std::uint64_t flows = 0;  // N
  double alpha = 0.0;
  std::uint64_t packets = 0;
  std::uint64_t seed = 0;
  int version = 1;

  friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

struct Trace {
  TraceHeader header;
  std::vector<FlowId> packets;

  friend bool operator==(const Trace&, const Trace&) = default;
};

inline constexpr std::uint64_t kDefaultFlows = 7000;
inline constexpr double kDefaultAlpha = 1.1;
inline constexpr std::uint64_t kDefaultPackets = 550000;
inline constexpr std::uint64_t kDefaultSeed = 42;

/// Draws `total_packets` flow IDs i.i.d. from the model using a splitmix64
/// stream seeded with `seed`. Pure function of its arguments.
/// Throws DomainError when total_packets == 0.
Trace generate_trace(const ZipfModel& model, std::uint64_t total_packets,
                     std::uint64_t seed);

/// Exact per-flow packet tallies; the ground truth sketches are scored
/// against.
class ExactCounts {
 public:
  ExactCounts() = default;
  explicit ExactCounts(std::span<const FlowId> packets);

  std::uint64_t count(FlowId id) const noexcept;
  std::uint64_t total() const noexcept { return total_; }
  std::size_t distinct() const noexcept { return counts_.size(); }
  bool empty() const noexcept { return counts_.empty(); }

  /// (flow, count) pairs ordered by count descending, then flow ascending.
  std::vector<std::pair<FlowId, std::uint64_t>> ranked() const;
  /// First k entries of ranked(). Throws DomainError if fewer than k flows.
  std::vector<std::pair<FlowId, std::uint64_t>> top_k(std::size_t k) const;

  const std::unordered_map<FlowId, std::uint64_t>& map() const noexcept {
    return counts_;
  }

 private:
  std::unordered_map<FlowId, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

ExactCounts exact_counts(const Trace& trace);

/// Consecutive segments of `window_packets` packets; the last may be short.
/// Throws DomainError when window_packets == 0.
std::vector<std::span<const FlowId>> window_stream(std::span<const FlowId> packets,
                                                   std::uint64_t window_packets);

// Text trace format: header line
//   #cms-trace v1 N=<N> alpha=<a> packets=<P> seed=<s>
// then one decimal flow ID per line.
void write_trace(std::ostream& out, const Trace& trace);
Trace read_trace(std::istream& in);
void save_trace(const std::filesystem::path& path, const Trace& trace);
Trace load_trace(const std::filesystem::path& path);

}  // namespace cms
