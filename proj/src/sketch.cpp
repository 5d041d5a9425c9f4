#include "cms/sketch.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <utility>

#include "cms/errors.hpp"
#include "cms/hash.hpp"

namespace cms {

namespace {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t sum = 0;
  if (__builtin_add_overflow(a, b, &sum)) {
    throw CounterOverflow("count-min sketch: 64-bit counter overflow");
  }
  return sum;
}

}  // namespace

Sketch::Sketch(const SketchConfig& config) : config_(config) {
  if (config.depth == 0 || config.width == 0) {
    throw ConfigError("count-min sketch: depth and width must be >= 1");
  }
  seeds_.resize(config.depth);
  for (std::size_t i = 0; i < config.depth; ++i) {
    seeds_[i] = row_seed(config.master_seed, i);
  }
  counters_.assign(config.depth * config.width, 0);
}

std::size_t Sketch::row_hash(std::size_t row, FlowId item) const noexcept {
  return static_cast<std::size_t>(column_of(seeds_[row], item, config_.width));
}

void Sketch::update(FlowId item, Counter count) {
  if (count == 0) {
    throw DomainError("count-min sketch: update count must be >= 1");
  }
  // Each row sums to items_, so no cell can exceed it: one check covers all.
  items_ = checked_add(items_, count);
  const std::size_t w = config_.width;
  for (std::size_t i = 0; i < config_.depth; ++i) {
    counters_[i * w + row_hash(i, item)] += count;
  }
}

Counter Sketch::query(FlowId item) const noexcept {
  Counter best = std::numeric_limits<Counter>::max();
  const std::size_t w = config_.width;
  for (std::size_t i = 0; i < config_.depth; ++i) {
    best = std::min(best, counters_[i * w + row_hash(i, item)]);
  }
  return best;
}

void Sketch::merge(const Sketch& other) {
  if (!(config_ == other.config_)) {
    throw ConfigError("count-min sketch: cannot merge sketches with different "
                      "(depth, width, master_seed)");
  }
  items_ = checked_add(items_, other.items_);
  std::transform(counters_.begin(), counters_.end(), other.counters_.begin(),
                 counters_.begin(), std::plus<>{});
}

void Sketch::reset() noexcept {
  std::fill(counters_.begin(), counters_.end(), Counter{0});
  items_ = 0;
}

Sketch Sketch::from_state(const SketchConfig& config,
                          std::uint64_t items_ingested,
                          std::vector<Counter> counters) {
  Sketch s(config);
  if (counters.size() != s.counters_.size()) {
    throw ConfigError("count-min sketch: counter matrix does not match d*w");
  }
  for (std::size_t i = 0; i < config.depth; ++i) {
    std::uint64_t sum = 0;
    for (std::size_t j = 0; j < config.width; ++j) {
      sum = checked_add(sum, counters[i * config.width + j]);
    }
    if (sum != items_ingested) {
      throw ConfigError("count-min sketch: row sum differs from items_ingested");
    }
  }
  s.counters_ = std::move(counters);
  s.items_ = items_ingested;
  return s;
}

}  // namespace cms
