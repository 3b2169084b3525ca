#include "iideval/model.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "iideval/errors.hpp"
#include "iideval/pointwise.hpp"
#include "test_support.hpp"

namespace iideval {
namespace {

using testing::alerts_of;
using testing::series_of;

TEST(ExtractScenarios, SplitsRunsWithoutGapTolerance) {
  const auto s = extract_scenarios(series_of("bbAAbA"));
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].points, (Interval{2, 3}));
  EXPECT_EQ(s[0].attack_type, "A");
  EXPECT_EQ(s[1].points, (Interval{5, 5}));
  EXPECT_EQ(s[1].attack_type, "A");
}

TEST(ExtractScenarios, MergesAcrossToleratedGap) {
  const auto s = extract_scenarios(series_of("bAbAb"), 1);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].points, (Interval{1, 3}));
  EXPECT_EQ(s[0].start_time, 1);
  EXPECT_EQ(s[0].end_time, 3);
}

TEST(ExtractScenarios, GapLargerThanToleranceKeepsSplit) {
  EXPECT_EQ(extract_scenarios(series_of("AbbA"), 1).size(), 2u);
  EXPECT_EQ(extract_scenarios(series_of("AbbA"), 2).size(), 1u);
}

TEST(ExtractScenarios, AllBenignIsEmpty) {
  EXPECT_TRUE(extract_scenarios(series_of("bbbb")).empty());
}

TEST(ExtractScenarios, AdjacentDifferentTypesStayDistinct) {
  const auto s = extract_scenarios(series_of("bAABBb"), 3);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].attack_type, "A");
  EXPECT_EQ(s[1].attack_type, "B");
  EXPECT_EQ(s[1].points, (Interval{3, 4}));
}

TEST(ExtractScenarios, DifferentTypeBetweenSameTypeBlocksMerge) {
  // A..A with a B run in between is not a benign gap.
  const auto s = extract_scenarios(series_of("AbBbA"), 3);
  ASSERT_EQ(s.size(), 3u);
}

TEST(ExtractScenarios, UsesTimestampsForTimes) {
  const std::vector<std::string> tokens{"benign", "x", "x", "benign"};
  const auto series = LabeledSeries::from_tokens("t", {10, 20, 30, 40}, tokens);
  const auto s = extract_scenarios(series);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].start_time, 20);
  EXPECT_EQ(s[0].end_time, 30);
}

TEST(ExtractScenarios, RejectsNegativeGap) {
  EXPECT_THROW(extract_scenarios(series_of("bA"), -1), ParameterError);
}

TEST(AlertsToIntervals, Examples) {
  const std::vector<std::uint8_t> mask{0, 1, 1, 0, 1};
  EXPECT_EQ(alerts_to_intervals(mask), (std::vector<Interval>{{1, 2}, {4, 4}}));
  EXPECT_TRUE(alerts_to_intervals(std::vector<std::uint8_t>(5, 0)).empty());
  EXPECT_EQ(alerts_to_intervals(std::vector<std::uint8_t>(4, 1)),
            (std::vector<Interval>{{0, 3}}));
}

TEST(AlertsToIntervals, SeriesOverloadChecksAlignment) {
  EXPECT_THROW(alerts_to_intervals(alerts_of("01"), series_of("bbb")), AlignmentError);
  EXPECT_EQ(alerts_to_intervals(alerts_of("011"), series_of("bbb")).size(), 1u);
}

std::vector<std::uint8_t> random_mask(std::mt19937_64& rng, std::size_t n, double p) {
  std::bernoulli_distribution bit(p);
  std::vector<std::uint8_t> m(n);
  for (auto& b : m) b = bit(rng) ? 1 : 0;
  return m;
}

bool sorted_disjoint_non_adjacent(const std::vector<Interval>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i].first > v[i].last) return false;
    if (i > 0 && v[i - 1].last + 1 >= v[i].first) return false;
  }
  return true;
}

TEST(MaskProperty, AlertIntervalsRoundTrip) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng() % 80;
    const auto mask = random_mask(rng, n, (rng() % 100) / 100.0);
    const auto iv = alerts_to_intervals(mask);
    ASSERT_TRUE(sorted_disjoint_non_adjacent(iv));
    ASSERT_EQ(intervals_to_mask(iv, n), mask);
  }
}

TEST(MaskProperty, ScenariosRoundTripToAttackMask) {
  std::mt19937_64 rng(11);
  const std::string alphabet = "bbbAB";
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng() % 80;
    std::string labels;
    for (std::size_t i = 0; i < n; ++i) labels += alphabet[rng() % alphabet.size()];
    const auto series = series_of(labels);
    const auto scenarios = extract_scenarios(series);
    const auto points = scenario_points(scenarios);
    // Different types may touch; same-type runs never do.
    for (std::size_t i = 1; i < scenarios.size(); ++i) {
      ASSERT_LT(scenarios[i - 1].points.last, scenarios[i].points.first);
      if (scenarios[i - 1].attack_type == scenarios[i].attack_type) {
        ASSERT_LT(scenarios[i - 1].points.last + 1, scenarios[i].points.first);
      }
    }
    ASSERT_EQ(intervals_to_mask(points, n), series.attack_mask());
  }
}

TEST(MaskProperty, MergedScenariosAreSortedAndSeparated) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 80;
    std::string labels;
    for (std::size_t i = 0; i < n; ++i) labels += (rng() % 3 == 0) ? 'A' : 'b';
    const std::int64_t gap = static_cast<std::int64_t>(rng() % 4);
    const auto points = scenario_points(extract_scenarios(series_of(labels), gap));
    for (std::size_t i = 1; i < points.size(); ++i) {
      ASSERT_GT(points[i].first - points[i - 1].last - 1, gap);
    }
  }
}

TEST(IntervalsToMask, RejectsOutOfRange) {
  const std::vector<Interval> iv{{2, 5}};
  EXPECT_THROW(intervals_to_mask(iv, 4), ValidationError);
}

TEST(CollapseMulticlass, AllAttackTypes) {
  const auto c = collapse_multiclass(series_of("bAB"), std::set<std::string>{"A", "B"});
  EXPECT_EQ(c.label(0), "benign");
  EXPECT_EQ(c.label(1), kCollapsedAttackType);
  EXPECT_EQ(c.label(2), kCollapsedAttackType);
  EXPECT_TRUE(c.is_binary());
}

TEST(CollapseMulticlass, Subset) {
  const auto c = collapse_multiclass(series_of("bAB"), std::set<std::string>{"A"});
  EXPECT_EQ(c.label(0), "benign");
  EXPECT_EQ(c.label(1), kCollapsedAttackType);
  EXPECT_EQ(c.label(2), "benign");
}

TEST(CollapseMulticlass, DefaultIsEveryAttackType) {
  const auto c = collapse_multiclass(series_of("bAB"));
  EXPECT_EQ(c.attack_point_count(), 2u);
}

TEST(CollapseMulticlass, UnknownClassThrows) {
  EXPECT_THROW(collapse_multiclass(series_of("bA"), std::set<std::string>{"Z"}),
               ParameterError);
}

TEST(CollapseMulticlass, BenignAsPositiveOnInvertedAlertsEqualsTnr) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng() % 60;
    std::string labels;
    std::string alerts;
    for (std::size_t i = 0; i < n; ++i) {
      labels += "bAB"[rng() % 3];
      alerts += (rng() % 2) ? '1' : '0';
    }
    const auto series = series_of(labels);
    std::string inverted;
    for (char c : alerts) inverted += (c == '1') ? '0' : '1';

    const auto binary = collapse_multiclass(series);
    const auto benign = collapse_multiclass(series, std::set<std::string>{"benign"});
    const auto tnr_value = tnr(confusion(binary, alerts_of(alerts))).value;
    const auto benign_tpr = tpr(confusion(benign, alerts_of(inverted))).value;
    ASSERT_EQ(tnr_value.has_value(), benign_tpr.has_value());
    if (tnr_value) ASSERT_EQ(*tnr_value, *benign_tpr);
  }
}

TEST(LabeledSeries, ValidatesConstruction) {
  EXPECT_THROW(LabeledSeries("x", {}, {}, {}), ValidationError);
  EXPECT_THROW(LabeledSeries("x", {0, 1}, {0}, {}), ValidationError);
  EXPECT_THROW(LabeledSeries("x", {0, 0}, {0, 0}, {}), ValidationError);
  EXPECT_THROW(LabeledSeries("x", {1, 0}, {0, 0}, {}), ValidationError);
  EXPECT_THROW(LabeledSeries("x", {0}, {2}, {"A"}), ValidationError);
  EXPECT_THROW(LabeledSeries("x", {0}, {0}, {}, 0.0), ValidationError);
  EXPECT_THROW(LabeledSeries("x", {0}, {1}, {"A", "A"}), ValidationError);
  EXPECT_NO_THROW(LabeledSeries("x", {0, 5}, {0, 1}, {"A"}));
}

TEST(LabeledSeries, TokensAndIndexLookup) {
  const std::vector<std::string> tokens{"0", "dos", "benign", "scan", "dos"};
  const auto s = LabeledSeries::from_tokens("x", {3, 4, 8, 9, 12}, tokens);
  EXPECT_EQ(s.attack_types(), (std::vector<std::string>{"dos", "scan"}));
  EXPECT_EQ(s.label(0), "benign");
  EXPECT_EQ(s.label(3), "scan");
  EXPECT_EQ(s.attack_point_count(), 3u);
  EXPECT_FALSE(s.is_binary());
  EXPECT_EQ(s.index_of(8), 2u);
  EXPECT_FALSE(s.index_of(7).has_value());
}

TEST(AlertSeries, KindViews) {
  const auto scored = AlertSeries::scored("d", "x", {0.1, 0.5, 0.9});
  EXPECT_EQ(scored.kind(), AlertKind::kScored);
  EXPECT_THROW(scored.alerts(), ParameterError);
  const auto b = scored.thresholded(0.5);
  EXPECT_EQ(b.kind(), AlertKind::kBoolean);
  EXPECT_EQ(std::vector<std::uint8_t>(b.alerts().begin(), b.alerts().end()),
            (std::vector<std::uint8_t>{0, 1, 1}));
  EXPECT_THROW(alerts_of("01").scores(), ParameterError);
  EXPECT_EQ(scored.renamed("e").detector(), "e");
}

TEST(AlertSeries, RejectsNonFiniteScores) {
  EXPECT_THROW(AlertSeries::scored("d", "x", {0.1, std::nan("")}), ValidationError);
  EXPECT_THROW(
      AlertSeries::scored("d", "x", {std::numeric_limits<double>::infinity()}),
      ValidationError);
}

TEST(CheckAligned, LengthMismatch) {
  EXPECT_THROW(check_aligned(series_of("bb"), alerts_of("0")), AlignmentError);
  EXPECT_NO_THROW(check_aligned(series_of("bb"), alerts_of("01")));
}

TEST(MetricValue, Keys) {
  EXPECT_EQ((MetricValue{"f1", 1.0, {}}).key(), "f1");
  EXPECT_EQ((MetricValue{"fbeta", 1.0, {{"beta", "0.1"}}}).key(), "fbeta:beta=0.1");
  EXPECT_EQ((MetricValue{"detected-scenarios", 1.0, {{"by-type", ""}}}).key(),
            "detected-scenarios:by-type");
}

TEST(MetricReport, RejectsDuplicateKeys) {
  MetricReport r("ds", "det");
  r.add({"f1", 0.5, {}});
  EXPECT_THROW(r.add({"f1", 0.4, {}}), ValidationError);
  r.add({"fbeta", 0.4, {{"beta", "2"}}});
  ASSERT_NE(r.find("fbeta:beta=2"), nullptr);
  EXPECT_EQ(r.find("missing"), nullptr);
}

}  // namespace
}  // namespace iideval
