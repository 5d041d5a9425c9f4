#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "cms/errors.hpp"
#include "cms/experiment.hpp"
#include "cms/heavy_hitter.hpp"
#include "cms/ingest.hpp"

namespace cms {
namespace {

TEST(TopKTracker, KeepsTheHeavierItem) {
  Sketch s({4, 1024, 3});
  TopKTracker t(1);
  const FlowId a = 11;
  const FlowId b = 22;
  ASSERT_NE(s.row_hash(0, a), s.row_hash(0, b));
  for (FlowId x : {a, b, b}) {
    s.update(x);
    t.track_update(s, x);
  }
  ASSERT_EQ(t.size(), 1U);
  EXPECT_TRUE(t.contains(b));
  EXPECT_EQ(t.estimate(b), 2U);
}

TEST(TopKTracker, TiesKeepTheIncumbent) {
  TopKTracker t(2);
  t.offer(1, 5);
  t.offer(2, 3);
  t.offer(3, 3);  // equal to the minimum: rejected
  EXPECT_TRUE(t.contains(2));
  EXPECT_FALSE(t.contains(3));
  t.offer(3, 4);  // beats the minimum: evicts 2
  EXPECT_FALSE(t.contains(2));
  EXPECT_TRUE(t.contains(3));
  EXPECT_EQ(t.threshold(), 4U);
}

TEST(TopKTracker, AmongTiedMinimaTheLargestIdIsEvicted) {
  TopKTracker t(3);
  t.offer(5, 2);
  t.offer(9, 2);
  t.offer(7, 2);
  t.offer(1, 3);
  EXPECT_FALSE(t.contains(9));
  EXPECT_TRUE(t.contains(5));
  EXPECT_TRUE(t.contains(7));
}

TEST(TopKTracker, RefreshesTrackedEstimates) {
  TopKTracker t(2);
  t.offer(1, 1);
  t.offer(1, 10);
  EXPECT_EQ(t.size(), 1U);
  EXPECT_EQ(t.estimate(1), 10U);
  const auto e = t.entries();
  ASSERT_EQ(e.size(), 1U);
  EXPECT_EQ(e[0], (std::pair<FlowId, Counter>{1, 10}));
}

TEST(TopKTracker, ZeroCapacityTracksNothing) {
  TopKTracker t(0);
  t.offer(1, 100);
  EXPECT_EQ(t.size(), 0U);
  EXPECT_EQ(t.threshold(), 0U);
}

TEST(TopKTracker, CapacityAboveFlowCountHoldsEveryFlow) {
  const Trace tr = generate_trace(ZipfModel(50, 1.1), 5000, 8);
  Sketch s({3, 64, 1});
  TopKTracker t(100);
  for (FlowId x : tr.packets) {
    s.update(x);
    t.track_update(s, x);
  }
  EXPECT_EQ(t.size(), exact_counts(tr).distinct());
}

// Soundness: after ingestion every tracked estimate equals the sketch answer
// at the item's last touch, is at least its true count, and only flows that
// appeared are tracked.
TEST(TopKTracker, EstimatesMatchSketchAtLastTouch) {
  const Trace tr = generate_trace(ZipfModel(7000, 1.1), 100'000, 3);
  Sketch s({3, 128, 2});
  TopKTracker t(20);
  std::unordered_map<FlowId, Counter> at_last_touch;
  for (FlowId x : tr.packets) {
    s.update(x);
    t.track_update(s, x);
    at_last_touch[x] = s.query(x);
  }
  const ExactCounts truth = exact_counts(tr);
  for (const auto& [id, est] : t.entries()) {
    EXPECT_EQ(est, at_last_touch.at(id));
    EXPECT_GE(est, truth.count(id));
  }
  auto entries = t.entries();
  std::sort(entries.begin(), entries.end());
  EXPECT_EQ(std::adjacent_find(entries.begin(), entries.end(),
                               [](auto& a, auto& b) { return a.first == b.first; }),
            entries.end());
}

TEST(Score, CollisionFreeRegimeIsExact) {
  const Trace tr = generate_trace(ZipfModel(100, 1.1), 50'000, 42);
  const ExactCounts truth = exact_counts(tr);
  const Sketch s = ingest_serial({5, 65536, 9}, tr.packets);
  const HeavyHitterReport r = score(s, truth, 20);
  ASSERT_EQ(r.rows.size(), 20U);
  for (const HeavyHitterRow& row : r.rows) {
    EXPECT_EQ(row.abs_error, 0U);
    EXPECT_EQ(row.estimated_count, row.true_count);
  }
  EXPECT_EQ(r.mean_abs_error, 0.0);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 1.0);
}

TEST(Score, RowsInDescendingTrueCountWithNonNegativeError) {
  const Trace tr = generate_trace(ZipfModel(7000, 1.1), 550'000, 42);
  const ExactCounts truth = exact_counts(tr);
  const Sketch s = ingest_serial({3, 64, 1}, tr.packets);
  const HeavyHitterReport r = score(s, truth, 20);
  const auto top = truth.top_k(20);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    EXPECT_EQ(r.rows[i].rank, i + 1);
    EXPECT_EQ(r.rows[i].flow_id, top[i].first);
    EXPECT_EQ(r.rows[i].true_count, top[i].second);
    EXPECT_GE(r.rows[i].estimated_count, r.rows[i].true_count);
    EXPECT_EQ(r.rows[i].abs_error, r.rows[i].estimated_count - r.rows[i].true_count);
  }
  // Both sets have exactly k members, so precision equals recall.
  EXPECT_EQ(r.predicted.size(), 20U);
  EXPECT_EQ(r.precision, r.recall);
  EXPECT_GE(r.precision, 0.0);
  EXPECT_LE(r.precision, 1.0);
}

TEST(Score, EmptyReportForZeroK) {
  const std::vector<FlowId> packets{1, 2, 2};
  const Sketch s = ingest_serial({2, 8, 0}, packets);
  const HeavyHitterReport r = score(s, ExactCounts(packets), 0);
  EXPECT_TRUE(r.rows.empty());
  EXPECT_EQ(r.mean_abs_error, 0.0);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 1.0);
}

TEST(Score, RejectsKBeyondSupport) {
  const std::vector<FlowId> packets{1, 2, 2};
  const Sketch s = ingest_serial({2, 8, 0}, packets);
  EXPECT_THROW(score(s, ExactCounts(packets), 3), DomainError);
}

TEST(Score, NarrowSketchOverestimatesMoreThanWideOnSameTrace) {
  const Trace tr = generate_trace(ZipfModel(7000, 1.1), 550'000, 42);
  const ExactCounts truth = exact_counts(tr);
  const std::uint64_t seed = sketch_seed_for(42);
  const double narrow = score(ingest_serial({3, 64, seed}, tr.packets), truth, 20).mean_abs_error;
  const double wide = score(ingest_serial({3, 256, seed}, tr.packets), truth, 20).mean_abs_error;
  EXPECT_GT(narrow, wide);
}

// Regression bound for the tracker on the default scenario at the
// (0.01, 0.01) dimensions. Over trace seeds 1..20 the lowest recall@20
// observed was 0.95; the floor leaves one miss of slack.
TEST(Score, TrackerRecallOnDefaultScenario) {
  constexpr double kRecallFloor = 0.9;
  const ZipfModel model(7000, 1.1);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Trace tr = generate_trace(model, 550'000, seed);
    const CellResult cell = evaluate_cell(tr, exact_counts(tr), {5, 272}, 20, seed);
    EXPECT_GE(cell.report.recall, kRecallFloor) << "seed " << seed;
  }
}

TEST(ReportOutput, CsvAndJson) {
  HeavyHitterReport r;
  r.k = 1;
  r.rows.push_back({1, 7, 100, 103, 3, 0.03});
  r.predicted = {7};
  r.mean_abs_error = 3;
  r.mean_rel_error = 0.03;
  r.max_abs_error = 3;
  std::ostringstream csv;
  write_report_csv(csv, r);
  EXPECT_EQ(csv.str(),
            "rank,flow_id,true_count,estimated_count,abs_error,rel_error\n"
            "1,7,100,103,3,0.030000\n");
  std::ostringstream json;
  write_report_json(json, r);
  EXPECT_EQ(json.str(),
            "{\"k\":1,\"precision\":1.0,\"recall\":1.0,\"mean_abs_error\":3.0,"
            "\"mean_rel_error\":0.03,\"max_abs_error\":3,\"predicted\":[7]}\n");
}

}  // namespace
}  // namespace cms
