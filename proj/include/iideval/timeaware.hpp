#pragma once

// Time-series-aware metrics. Attacks and alarms are treated as intervals
// rather than independent points.
//
// Coordinates: detected_scenarios and detection_delay work on ticks (use
// to_tick_intervals for alert runs). etapr and affiliation work on point
// indices, which is how their reference definitions count samples.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "iideval/model.hpp"

namespace iideval {

struct TimeAwareScores {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

// Weighted harmonic mean of the pair; Undefined if either side is.
std::optional<double> f_beta(const TimeAwareScores& scores, double beta);

// --- detected scenarios -----------------------------------------------------

struct DetectedScenarios {
  MetricValue ratio;           // "detected-scenarios" or "...:by-type"
  std::vector<bool> detected;  // per scenario, input order
};

// A scenario is detected iff some alert interval intersects it (both ends
// inclusive). With `group_by_type` an attack type counts once, detected if
// any of its scenarios is, and the denominator is the number of types.
DetectedScenarios detected_scenarios(std::span<const AttackScenario> scenarios,
                                     std::span<const Interval> alert_ticks,
                                     bool group_by_type = false);

// --- detection delay --------------------------------------------------------

struct DelaySummary {
  std::vector<ScenarioDetection> details;
  std::optional<double> mean_ticks;    // over detected scenarios
  std::optional<double> median_ticks;  // over detected scenarios
  std::size_t undetected = 0;
};

// Delay = max(0, start of the first overlapping alert - scenario start).
// Alert intervals must be sorted and disjoint.
DelaySummary detection_delay(std::span<const AttackScenario> scenarios,
                             std::span<const Interval> alert_ticks);

// --- eTaPR --------------------------------------------------------------------

// Thresholds of the enhanced time-series-aware precision/recall. An anomaly
// counts as detected when at least theta_r of it is covered; a prediction is
// correct when at least theta_p of it lies inside anomalies. Both must be in
// (0, 1].
struct EtaParams {
  double theta_p = 0.5;
  double theta_r = 0.1;
};

void validate(const EtaParams& params);

// Anomalies and predictions are sorted, disjoint inclusive point intervals.
//
// Overlaps below the thresholds are pruned iteratively (alternating anomaly
// and prediction passes until neither removes anything). Each survivor then
// scores (d + d * portion) / 2 with d the 0/1 detection flag. eTaR averages
// anomalies uniformly; eTaP weighs each prediction by sqrt(length).
//
// Recall is Undefined without anomalies, precision without predictions.
TimeAwareScores etapr(std::span<const Interval> anomalies,
                      std::span<const Interval> predictions,
                      const EtaParams& params = {});

// --- affiliation ----------------------------------------------------------------

// Half-open continuous range [begin, end).
struct TimeRange {
  double begin = 0.0;
  double end = 0.0;
  friend bool operator==(const TimeRange&, const TimeRange&) = default;
};

struct AffiliationDetail {
  TimeAwareScores scores;
  std::vector<TimeRange> zones;
  std::vector<std::optional<double>> zone_precision;  // Undefined: no alerts
  std::vector<double> zone_recall;
};

// Affiliation metrics on continuous events. The span is partitioned into one
// zone per ground-truth event (boundaries halfway between neighbours). Within
// a zone, every alert instant is scored by the probability that a uniformly
// random instant of the zone lies farther from the event (precision), and
// every event instant by the same probability with respect to the nearest
// alert (recall). Zone precisions are averaged over zones holding alerts,
// zone recalls over all zones.
//
// Events must be sorted, disjoint, of positive length and inside `range`.
// Throws ParameterError without ground-truth events.
AffiliationDetail affiliation_events(std::span<const TimeRange> ground_truth,
                                     std::span<const TimeRange> predictions,
                                     TimeRange range);

// Point-index front end: point i occupies [i, i + 1). `series_span` is the
// inclusive index range of the whole series.
TimeAwareScores affiliation(std::span<const Interval> scenarios,
                            std::span<const Interval> alert_intervals,
                            Interval series_span);

}  // namespace iideval
