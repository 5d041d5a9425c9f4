#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cms/sketch.hpp"
#include "cms/traffic.hpp"

namespace cms {

/// Fixed-capacity set of candidate heavy hitters maintained alongside a
/// sketch during ingestion. A count-min sketch cannot enumerate its keys, so
/// every ingested item is offered here with its fresh estimate.
///
/// Replacement rule: a tracked item is refreshed; an untracked item enters if
/// there is room, or if its estimate strictly exceeds the smallest tracked
/// estimate (which is then evicted). Equal estimates keep the incumbent.
/// Among several entries tied at the minimum, the one with the largest
/// FlowId is evicted first.
class TopKTracker {
 public:
  explicit TopKTracker(std::size_t capacity) : capacity_(capacity) {}

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return estimates_.size(); }

  /// Call right after sketch.update(item).
  void track_update(const Sketch& sketch, FlowId item) {
    offer(item, sketch.query(item));
  }
  void offer(FlowId item, Counter estimate);

  bool contains(FlowId item) const { return estimates_.contains(item); }
  /// Estimate recorded at the last touch of `item`, 0 if untracked.
  Counter estimate(FlowId item) const;
  /// Smallest tracked estimate, 0 when empty.
  Counter threshold() const;

  /// Entries ordered by estimate descending, then FlowId ascending.
  std::vector<std::pair<FlowId, Counter>> entries() const;

  void clear();

 private:
  struct ByEstimate {
    bool operator()(const std::pair<Counter, FlowId>& a,
                    const std::pair<Counter, FlowId>& b) const {
      return a.first != b.first ? a.first < b.first : a.second > b.second;
    }
  };

  std::size_t capacity_;
  std::unordered_map<FlowId, Counter> estimates_;
  std::set<std::pair<Counter, FlowId>, ByEstimate> order_;
};

struct HeavyHitterRow {
  std::size_t rank = 0;  // 1-based, by true count
  FlowId flow_id = 0;
  std::uint64_t true_count = 0;
  Counter estimated_count = 0;
  std::uint64_t abs_error = 0;  // estimated - true, never negative
  double rel_error = 0.0;       // abs_error / true_count
};

struct HeavyHitterReport {
  std::size_t k = 0;
  std::vector<HeavyHitterRow> rows;  // true top-k, descending true count
  std::vector<FlowId> predicted;     // flows the estimator ranks as top-k
  double precision = 1.0;            // |predicted & true| / |predicted|
  double recall = 1.0;               // |predicted & true| / k
  double mean_abs_error = 0.0;       // mean overestimation over true top-k
  double mean_rel_error = 0.0;
  std::uint64_t max_abs_error = 0;
};

/// Scores the sketch against the oracle's true top-k (ties by ascending
/// FlowId). The predicted set is the k flows of the oracle's support with the
/// largest estimates (ties by ascending FlowId).
/// Throws DomainError if the oracle has fewer than k distinct flows.
HeavyHitterReport score(const Sketch& sketch, const ExactCounts& oracle,
                        std::size_t k);

/// Same rows, but precision/recall are computed for the tracker's final set.
HeavyHitterReport score(const Sketch& sketch, const ExactCounts& oracle,
                        std::size_t k, const TopKTracker& tracker);

/// CSV: header `rank,flow_id,true_count,estimated_count,abs_error,rel_error`.
void write_report_csv(std::ostream& out, const HeavyHitterReport& report);
/// One-line JSON object with the aggregate metrics.
void write_report_json(std::ostream& out, const HeavyHitterReport& report);

}  // namespace cms
