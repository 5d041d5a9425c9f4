#include "cms/heavy_hitter.hpp"

#include <algorithm>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

namespace cms {

void TopKTracker::offer(FlowId item, Counter estimate) {
  if (capacity_ == 0) {
    return;
  }
  if (auto it = estimates_.find(item); it != estimates_.end()) {
    order_.erase({it->second, item});
    it->second = estimate;
    order_.emplace(estimate, item);
    return;
  }
  if (estimates_.size() < capacity_) {
    estimates_.emplace(item, estimate);
    order_.emplace(estimate, item);
    return;
  }
  const auto lowest = order_.begin();
  if (estimate <= lowest->first) {
    return;
  }
  estimates_.erase(lowest->second);
  order_.erase(lowest);
  estimates_.emplace(item, estimate);
  order_.emplace(estimate, item);
}

Counter TopKTracker::estimate(FlowId item) const {
  const auto it = estimates_.find(item);
  return it == estimates_.end() ? 0 : it->second;
}

Counter TopKTracker::threshold() const {
  return order_.empty() ? 0 : order_.begin()->first;
}

std::vector<std::pair<FlowId, Counter>> TopKTracker::entries() const {
  std::vector<std::pair<FlowId, Counter>> out(estimates_.begin(), estimates_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return out;
}

void TopKTracker::clear() {
  estimates_.clear();
  order_.clear();
}

namespace {

HeavyHitterReport build_rows(const Sketch& sketch, const ExactCounts& oracle,
                             std::size_t k) {
  HeavyHitterReport report;
  report.k = k;
  const auto truth = oracle.top_k(k);
  report.rows.reserve(k);
  double abs_sum = 0.0;
  double rel_sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    HeavyHitterRow row;
    row.rank = i + 1;
    row.flow_id = truth[i].first;
    row.true_count = truth[i].second;
    row.estimated_count = sketch.query(row.flow_id);
    row.abs_error = row.estimated_count - row.true_count;
    row.rel_error = static_cast<double>(row.abs_error) /
                    static_cast<double>(row.true_count);
    abs_sum += static_cast<double>(row.abs_error);
    rel_sum += row.rel_error;
    report.max_abs_error = std::max(report.max_abs_error, row.abs_error);
    report.rows.push_back(row);
  }
  if (k > 0) {
    report.mean_abs_error = abs_sum / static_cast<double>(k);
    report.mean_rel_error = rel_sum / static_cast<double>(k);
  }
  return report;
}

void set_prediction(HeavyHitterReport& report, std::vector<FlowId> predicted) {
  report.predicted = std::move(predicted);
  if (report.k == 0) {
    return;
  }
  std::unordered_set<FlowId> truth;
  for (const HeavyHitterRow& row : report.rows) {
    truth.insert(row.flow_id);
  }
  std::size_t hits = 0;
  for (FlowId id : report.predicted) {
    hits += truth.contains(id) ? 1 : 0;
  }
  report.precision = report.predicted.empty()
                         ? 1.0
                         : static_cast<double>(hits) /
                               static_cast<double>(report.predicted.size());
  report.recall = static_cast<double>(hits) / static_cast<double>(report.k);
}

}  // namespace

HeavyHitterReport score(const Sketch& sketch, const ExactCounts& oracle,
                        std::size_t k) {
  HeavyHitterReport report = build_rows(sketch, oracle, k);
  std::vector<std::pair<FlowId, Counter>> estimated;
  estimated.reserve(oracle.distinct());
  for (const auto& [id, count] : oracle.map()) {
    estimated.emplace_back(id, sketch.query(id));
  }
  const auto by_estimate = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  std::partial_sort(estimated.begin(), estimated.begin() + static_cast<std::ptrdiff_t>(k),
                    estimated.end(), by_estimate);
  std::vector<FlowId> predicted;
  predicted.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    predicted.push_back(estimated[i].first);
  }
  set_prediction(report, std::move(predicted));
  return report;
}

HeavyHitterReport score(const Sketch& sketch, const ExactCounts& oracle,
                        std::size_t k, const TopKTracker& tracker) {
  HeavyHitterReport report = build_rows(sketch, oracle, k);
  std::vector<FlowId> predicted;
  for (const auto& [id, est] : tracker.entries()) {
    if (predicted.size() == k) {
      break;
    }
    predicted.push_back(id);
  }
  set_prediction(report, std::move(predicted));
  return report;
}

void write_report_csv(std::ostream& out, const HeavyHitterReport& report) {
  out << "rank,flow_id,true_count,estimated_count,abs_error,rel_error\n";
  for (const HeavyHitterRow& r : report.rows) {
    out << fmt::format("{},{},{},{},{},{:.6f}\n", r.rank, r.flow_id, r.true_count,
                       r.estimated_count, r.abs_error, r.rel_error);
  }
}

void write_report_json(std::ostream& out, const HeavyHitterReport& report) {
  nlohmann::ordered_json j;
  j["k"] = report.k;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["mean_abs_error"] = report.mean_abs_error;
  j["mean_rel_error"] = report.mean_rel_error;
  j["max_abs_error"] = report.max_abs_error;
  j["predicted"] = report.predicted;
  out << j.dump() << '\n';
}

}  // namespace cms
