#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "cms/dimensioning.hpp"
#include "cms/errors.hpp"
#include "cms/traffic.hpp"
#include "test_util.hpp"

namespace cms {
namespace {

TEST(ZipfModel, HeadMassOfDefaultScenario) {
  const ZipfModel m(7000, 1.1);
  // 40-digit mpmath evaluation of k^-1.1 / sum_{n<=7000} n^-1.1.
  EXPECT_NEAR(m.freq(1), 0.15482635480464436, 1e-13);
  EXPECT_NEAR(m.head_mass(20), 0.49412251122478921, 1e-13);
  EXPECT_NEAR(m.freq(20), 0.0057373572587688464, 1e-15);
  EXPECT_GE(m.freq(1), 0.150);
  EXPECT_LE(m.freq(1), 0.160);
  EXPECT_GE(m.head_mass(20), 0.48);
  EXPECT_LE(m.head_mass(20), 0.50);
}

TEST(ZipfModel, SmallCases) {
  EXPECT_EQ(ZipfModel(1, 0.7).freq(1), 1.0);
  const ZipfModel two(2, 1.0);
  EXPECT_NEAR(two.freq(1), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(two.freq(2), 1.0 / 3.0, 1e-15);
}

TEST(ZipfModel, NormalizedAndStrictlyDecreasing) {
  for (const auto& [n, alpha] : {std::pair{7000UL, 1.1}, std::pair{100UL, 0.3},
                                 std::pair{50000UL, 2.5}, std::pair{3UL, 0.01}}) {
    const ZipfModel m(n, alpha);
    const auto f = m.frequencies();
    EXPECT_NEAR(std::accumulate(f.begin(), f.end(), 0.0), 1.0, 1e-12);
    for (std::size_t k = 1; k < f.size(); ++k) {
      ASSERT_LT(f[k], f[k - 1]);
    }
    EXPECT_EQ(m.cdf().back(), 1.0);
  }
}

TEST(ZipfModel, RejectsBadParameters) {
  EXPECT_THROW(ZipfModel(0, 1.1), DomainError);
  EXPECT_THROW(ZipfModel(10, 0.0), DomainError);
  EXPECT_THROW(ZipfModel(10, -1.0), DomainError);
}

TEST(ZipfModel, SampleCoversTheSupport) {
  const ZipfModel m(3, 1.0);
  EXPECT_EQ(m.sample(0.0), 1U);
  EXPECT_EQ(m.sample(std::nextafter(1.0, 0.0)), 3U);
  EXPECT_EQ(m.sample(m.cdf()[0]), 2U);  // boundary belongs to the next flow
}

TEST(GenerateTrace, EmpiricalHeadShareWithinThreeStandardErrors) {
  const ZipfModel m(7000, 1.1);
  const Trace t = generate_trace(m, 550'000, 42);
  const ExactCounts c = exact_counts(t);
  const double p = m.freq(1);
  const double n = 550'000.0;
  const double share = static_cast<double>(c.count(1)) / n;
  EXPECT_NEAR(share, p, 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST(GenerateTrace, DeterministicPerSeed) {
  const ZipfModel m(7000, 1.1);
  const Trace a = generate_trace(m, 10'000, 42);
  EXPECT_EQ(a, generate_trace(m, 10'000, 42));
  EXPECT_NE(a.packets, generate_trace(m, 10'000, 43).packets);
  EXPECT_EQ(a.header, (TraceHeader{7000, 1.1, 10'000, 42, 1}));
  for (FlowId id : a.packets) {
    ASSERT_GE(id, 1U);
    ASSERT_LE(id, 7000U);
  }
}

TEST(GenerateTrace, SingleFlow) {
  const Trace t = generate_trace(ZipfModel(1, 1.1), 1000, 3);
  for (FlowId id : t.packets) ASSERT_EQ(id, 1U);
}

TEST(GenerateTrace, RejectsEmptyTrace) {
  EXPECT_THROW(generate_trace(ZipfModel(5, 1.0), 0, 1), DomainError);
}

TEST(ExactCounts, HandCounts) {
  EXPECT_TRUE(ExactCounts(std::span<const FlowId>{}).empty());
  const std::vector<FlowId> packets{1, 1, 2};
  const ExactCounts c(packets);
  EXPECT_EQ(c.count(1), 2U);
  EXPECT_EQ(c.count(2), 1U);
  EXPECT_EQ(c.count(3), 0U);
  EXPECT_EQ(c.total(), 3U);
  EXPECT_EQ(c.distinct(), 2U);
}

TEST(ExactCounts, ConservationAndRanking) {
  const Trace t = generate_trace(ZipfModel(7000, 1.1), 550'000, 42);
  const ExactCounts c = exact_counts(t);
  std::uint64_t sum = 0;
  for (const auto& [id, n] : c.map()) sum += n;
  EXPECT_EQ(sum, 550'000U);
  EXPECT_EQ(c.total(), 550'000U);
  EXPECT_LE(c.distinct(), 7000U);
  const auto ranked = c.ranked();
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    const bool ordered = ranked[i - 1].second > ranked[i].second ||
                         (ranked[i - 1].second == ranked[i].second &&
                          ranked[i - 1].first < ranked[i].first);
    ASSERT_TRUE(ordered) << i;
  }
  EXPECT_EQ(c.top_k(20).size(), 20U);
  EXPECT_THROW(c.top_k(c.distinct() + 1), DomainError);
}

TEST(ExactCounts, TiesRankBySmallerFlowId) {
  const std::vector<FlowId> packets{9, 4, 4, 9, 7};
  const auto top = ExactCounts(packets).top_k(3);
  EXPECT_EQ(top[0].first, 4U);
  EXPECT_EQ(top[1].first, 9U);
  EXPECT_EQ(top[2].first, 7U);
}

TEST(WindowStream, Partitions) {
  std::vector<FlowId> ten(10);
  std::iota(ten.begin(), ten.end(), 1);
  const auto w = window_stream(ten, 3);
  ASSERT_EQ(w.size(), 4U);
  EXPECT_EQ(w[0].size(), 3U);
  EXPECT_EQ(w[3].size(), 1U);
  std::vector<FlowId> joined;
  for (auto seg : w) joined.insert(joined.end(), seg.begin(), seg.end());
  EXPECT_EQ(joined, ten);
  EXPECT_THROW(window_stream(ten, 0), DomainError);
  EXPECT_TRUE(window_stream({}, 5).empty());
}

TEST(WindowStream, WindowSizedFromLineRate) {
  const Trace t = generate_trace(ZipfModel(7000, 1.1), 550'000, 42);
  EXPECT_EQ(window_stream(t.packets, 550'000).size(), 1U);
  const std::uint64_t per_window = window_packets({100e9, 0.4}, 0.1);
  EXPECT_NEAR(static_cast<double>(per_window), 574'000.0, 1'000.0);
  const Trace big = generate_trace(ZipfModel(7000, 1.1), 2'000'000, 1);
  const auto windows = window_stream(big.packets, per_window);
  EXPECT_EQ(windows.size(), (2'000'000 + per_window - 1) / per_window);
  std::size_t total = 0;
  for (auto seg : windows) total += seg.size();
  EXPECT_EQ(total, 2'000'000U);
}

TEST(TraceFormat, HeaderAndBody) {
  const Trace t = generate_trace(ZipfModel(7000, 1.1), 5, 42);
  std::ostringstream out;
  write_trace(out, t);
  std::istringstream lines(out.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "#cms-trace v1 N=7000 alpha=1.1 packets=5 seed=42");
  std::istringstream in(out.str());
  EXPECT_EQ(read_trace(in), t);
}

TEST(TraceFormat, RoundTripsThroughFile) {
  const Trace t = generate_trace(ZipfModel(300, 0.8), 20'000, 17);
  test::TempDir dir;
  save_trace(dir / "t.txt", t);
  EXPECT_EQ(load_trace(dir / "t.txt"), t);
}

TEST(TraceFormat, RejectsMalformedInput) {
  const auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_trace(in);
  };
  EXPECT_THROW(parse(""), FormatError);
  EXPECT_THROW(parse("hello\n1\n"), FormatError);
  EXPECT_THROW(parse("#cms-trace v2 N=3 alpha=1 packets=1 seed=0\n1\n"), FormatError);
  EXPECT_THROW(parse("#cms-trace v1 N=3 alpha=1 packets=2 seed=0\n1\n"), FormatError);
  EXPECT_THROW(parse("#cms-trace v1 N=3 alpha=1 packets=1 seed=0\n4\n"), FormatError);
  EXPECT_THROW(parse("#cms-trace v1 N=3 alpha=1 packets=1 seed=0\nx\n"), FormatError);
  EXPECT_THROW(parse("#cms-trace v1 N=3 packets=1 seed=0\n1\n"), FormatError);
  EXPECT_NO_THROW(parse("#cms-trace v1 N=3 alpha=1 packets=1 seed=0\n3\n"));
}

}  // namespace
}  // namespace cms
