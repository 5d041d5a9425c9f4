#include "cms/dimensioning.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cms/errors.hpp"

namespace cms {

namespace {

// Ceiling that treats values within 1e-9 (relative) of an integer as that
// integer,
// so that dims_from_target(error_bound(d, w)) gives back (d, w) instead of
// (d+1, w+1) from rounding noise in e/(e/w) or -ln(exp(-d)).
double stable_ceil(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) {
    return r;
  }
  return std::ceil(x);
}

bool open_unit(double x) { return x > 0.0 && x < 1.0; }

constexpr std::array<PublishedRate, 6> kPublished{{
    {100e9, 0.10, 18.25e3, 1.54e6},
    {100e9, 0.40, 73.0e3, 6.17e6},
    {100e9, 0.70, 127.75e3, 10.8e6},
    {400e9, 0.10, 73.0e3, 6.16e6},
    {400e9, 0.40, 292.0e3, 24.64e6},
    {400e9, 0.70, 511.0e3, 43.12e6},
}};

}  // namespace

Dimensions dims_from_target(const AccuracyTarget& target) {
  if (!open_unit(target.epsilon) || !open_unit(target.delta)) {
    throw DomainError("epsilon and delta must both lie in (0, 1)");
  }
  const double d = stable_ceil(-std::log(target.delta));
  const double w = stable_ceil(kEuler / target.epsilon);
  if (!(w < 0x1.0p63)) {
    throw DomainError("epsilon too small: width does not fit in 64 bits");
  }
  return {static_cast<std::size_t>(std::max(1.0, d)),
          static_cast<std::size_t>(std::max(1.0, w))};
}

ErrorBound error_bound(std::size_t depth, std::size_t width,
                       std::uint64_t items_ingested) {
  if (depth == 0 || width == 0) {
    throw DomainError("depth and width must be >= 1");
  }
  ErrorBound b;
  b.epsilon = kEuler / static_cast<double>(width);
  b.delta = std::exp(-static_cast<double>(depth));
  b.additive = b.epsilon * static_cast<double>(items_ingested);
  return b;
}

std::uint64_t memory_bits(std::uint64_t depth, std::uint64_t width,
                          std::uint64_t counter_bits) {
  if (depth == 0 || width == 0 || counter_bits == 0) {
    throw DomainError("memory_bits: all factors must be >= 1");
  }
  std::uint64_t cells = 0;
  std::uint64_t bits = 0;
  if (__builtin_mul_overflow(depth, width, &cells) ||
      __builtin_mul_overflow(cells, counter_bits, &bits)) {
    throw DomainError("memory_bits: product overflows 64 bits");
  }
  return bits;
}

DimensionSpec dimension_spec(const AccuracyTarget& target,
                             std::uint64_t counter_bits) {
  const Dimensions dims = dims_from_target(target);
  return {dims.depth, dims.width, counter_bits,
          memory_bits(dims.depth, dims.width, counter_bits)};
}

RateEstimate rate_estimate(const TrafficProfile& p) {
  if (!(p.line_rate_bps > 0.0) || !(p.load > 0.0) || !(p.load <= 1.0) ||
      !(p.avg_packet_bytes > 0.0) || !(p.avg_flow_packets > 0.0)) {
    throw DomainError(
        "traffic profile: line rate, packet size and flow size must be "
        "positive and load must lie in (0, 1]");
  }
  RateEstimate r;
  r.packet_rate = p.line_rate_bps * p.load / (p.avg_packet_bytes * 8.0);
  r.flow_rate = r.packet_rate / p.avg_flow_packets;
  return r;
}

std::uint64_t window_packets(const TrafficProfile& profile, double seconds) {
  if (!(seconds > 0.0)) {
    throw DomainError("window length must be positive");
  }
  const double packets = rate_estimate(profile).packets_per_window(seconds);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(packets)));
}

std::span<const PublishedRate> published_rates() { return kPublished; }

std::optional<PublishedRate> find_published_rate(double line_rate_bps,
                                                 double load) {
  for (const PublishedRate& cell : kPublished) {
    if (std::abs(cell.line_rate_bps - line_rate_bps) <= 1e-9 * cell.line_rate_bps &&
        std::abs(cell.load - load) <= 1e-9) {
      return cell;
    }
  }
  return std::nullopt;
}

RateComparison compare_with_published(const PublishedRate& cell) {
  RateComparison c;
  c.published = cell;
  c.computed = rate_estimate({cell.line_rate_bps, cell.load});
  c.flow_rate_rel_error = (c.computed.flow_rate - cell.flow_rate) / cell.flow_rate;
  c.packet_rate_rel_error =
      (c.computed.packet_rate - cell.packet_rate) / cell.packet_rate;
  c.flow_rate_discrepancy = std::abs(c.flow_rate_rel_error) > kDiscrepancyTolerance;
  c.packet_rate_discrepancy =
      std::abs(c.packet_rate_rel_error) > kDiscrepancyTolerance;
  return c;
}

}  // namespace cms
