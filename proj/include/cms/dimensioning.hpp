#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

namespace cms {

inline constexpr double kEuler = 2.718281828459045235360287471352662498;

/// Target guarantee: the estimate exceeds the truth by more than
/// epsilon * items_ingested with probability at most delta.
struct AccuracyTarget {
  double epsilon = 0.01;
  double delta = 0.01;
};

struct Dimensions {
  std::size_t depth = 1;
  std::size_t width = 1;

  friend bool operator==(const Dimensions&, const Dimensions&) = default;
};

struct ErrorBound {
  double epsilon = 0.0;
  double delta = 0.0;
  double additive = 0.0;  // epsilon * items_ingested, in packets
};

struct DimensionSpec {
  std::size_t depth = 1;
  std::size_t width = 1;
  std::uint64_t counter_bits = 64;
  std::uint64_t total_bits = 0;
};

/// d = ceil(ln(1/delta)), w = ceil(e/epsilon). Throws DomainError unless both
/// lie in (0, 1).
Dimensions dims_from_target(const AccuracyTarget& target);

/// Inverse of dims_from_target: epsilon = e/w, delta = exp(-d).
/// Throws DomainError for zero dimensions.
ErrorBound error_bound(std::size_t depth, std::size_t width,
                       std::uint64_t items_ingested);

/// depth * width * counter_bits. Throws DomainError if any factor is zero or
/// the product overflows.
std::uint64_t memory_bits(std::uint64_t depth, std::uint64_t width,
                          std::uint64_t counter_bits);

DimensionSpec dimension_spec(const AccuracyTarget& target,
                             std::uint64_t counter_bits);

// Campus-trace averages used as defaults for the per-port rate model.
inline constexpr double kAvgPacketBytes = 870.6;
inline constexpr double kAvgFlowPackets = 78.5;

struct TrafficProfile {
  double line_rate_bps = 100e9;
  double load = 0.4;
  double avg_packet_bytes = kAvgPacketBytes;
  double avg_flow_packets = kAvgFlowPackets;
};

struct RateEstimate {
  double packet_rate = 0.0;  // packets/s
  double flow_rate = 0.0;    // flows/s

  double flows_per_window(double seconds) const { return flow_rate * seconds; }
  double packets_per_window(double seconds) const {
    return packet_rate * seconds;
  }
};

/// packet_rate = line_rate*load / (8*avg_packet_bytes);
/// flow_rate = packet_rate / avg_flow_packets.
/// Throws DomainError unless every field is positive and load <= 1.
RateEstimate rate_estimate(const TrafficProfile& profile);

/// Packet budget of a monitoring window of `seconds` (rounded, at least 1).
std::uint64_t window_packets(const TrafficProfile& profile, double seconds);

/// A printed cell of the published per-port rate table.
struct PublishedRate {
  double line_rate_bps;
  double load;
  double flow_rate;
  double packet_rate;
};

std::span<const PublishedRate> published_rates();

/// Published cell matching (line_rate, load), if any.
std::optional<PublishedRate> find_published_rate(double line_rate_bps,
                                                 double load);

inline constexpr double kDiscrepancyTolerance = 0.01;

struct RateComparison {
  PublishedRate published;
  RateEstimate computed;
  double flow_rate_rel_error = 0.0;
  double packet_rate_rel_error = 0.0;
  bool flow_rate_discrepancy = false;    // |rel error| > 1%
  bool packet_rate_discrepancy = false;  // |rel error| > 1%
};

/// Compares the rate model (default averages) against a published cell.
RateComparison compare_with_published(const PublishedRate& cell);

}  // namespace cms
