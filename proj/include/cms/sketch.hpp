#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cms {

using FlowId = std::uint64_t;
using Counter = std::uint64_t;

struct SketchConfig {
  std::size_t depth = 1;
  std::size_t width = 1;
  std::uint64_t master_seed = 0;

  friend bool operator==(const SketchConfig&, const SketchConfig&) = default;
};

/// Count-Min Sketch: `depth` rows of `width` 64-bit counters, one hash
/// function per row. An update adds to one cell in every row; a point query
/// returns the minimum of those cells and never underestimates.
///
/// Instances are single-writer. Parallel ingestion shards the stream over
/// several sketches with the same config and combines them with merge().
class Sketch {
 public:
  /// Throws ConfigError when depth or width is zero.
  explicit Sketch(const SketchConfig& config);

  const SketchConfig& config() const noexcept { return config_; }
  std::size_t depth() const noexcept { return config_.depth; }
  std::size_t width() const noexcept { return config_.width; }

  /// L1 norm of all updates.
  std::uint64_t items_ingested() const noexcept { return items_; }

  /// Column of `item` in `row`. Precondition: row < depth().
  std::size_t row_hash(std::size_t row, FlowId item) const noexcept;

  /// Adds `count` to one cell per row. Throws DomainError for count == 0 and
  /// CounterOverflow (leaving the sketch unchanged) if any counter would wrap.
  void update(FlowId item, Counter count = 1);

  Counter query(FlowId item) const noexcept;

  /// Elementwise sum. Throws ConfigError if the configs differ and
  /// CounterOverflow (leaving *this unchanged) on wrap.
  void merge(const Sketch& other);

  void reset() noexcept;

  Counter at(std::size_t row, std::size_t col) const noexcept {
    return counters_[row * config_.width + col];
  }
  std::span<const Counter> row(std::size_t r) const noexcept {
    return {counters_.data() + r * config_.width, config_.width};
  }
  /// Row-major d*w matrix.
  std::span<const Counter> counters() const noexcept { return counters_; }
  std::span<const std::uint64_t> row_seeds() const noexcept { return seeds_; }

  /// Rebuilds a sketch from raw state (used by snapshot loading). Throws
  /// ConfigError if the counter count does not match the config or a row sum
  /// differs from items_ingested.
  static Sketch from_state(const SketchConfig& config,
                           std::uint64_t items_ingested,
                           std::vector<Counter> counters);

  friend bool operator==(const Sketch& a, const Sketch& b) noexcept {
    return a.config_ == b.config_ && a.items_ == b.items_ &&
           a.counters_ == b.counters_;
  }

 private:
  SketchConfig config_;
  std::vector<std::uint64_t> seeds_;
  std::vector<Counter> counters_;
  std::uint64_t items_ = 0;
};

}  // namespace cms
