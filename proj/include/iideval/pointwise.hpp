#pragma once

// Point-based metrics: every value derives from a per-point comparison of
// ground truth and alerts.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "iideval/model.hpp"

namespace iideval {

// Per-point counting. Throws AlignmentError on length mismatch and
// ValidationError if the series has more than one attack type (collapse it
// first).
ConfusionMatrix confusion(const LabeledSeries& series, const AlertSeries& alerts);
ConfusionMatrix confusion(std::span<const std::uint8_t> truth,
                          std::span<const std::uint8_t> alerts);

// Ratios of the confusion matrix, Undefined on a zero denominator.
MetricValue tpr(const ConfusionMatrix& cm);       // TP / (TP + FN)
MetricValue fnr(const ConfusionMatrix& cm);       // FN / (TP + FN)
MetricValue tnr(const ConfusionMatrix& cm);       // TN / (TN + FP)
MetricValue fpr(const ConfusionMatrix& cm);       // FP / (FP + TN)
MetricValue ppv(const ConfusionMatrix& cm);       // TP / (TP + FP)
MetricValue npv(const ConfusionMatrix& cm);       // TN / (TN + FN)
MetricValue accuracy(const ConfusionMatrix& cm);  // (TP + TN) / n

struct FBetaParams {
  double beta = 1.0;  // weight of recall relative to precision
};

inline constexpr FBetaParams kF1{1.0};
inline constexpr FBetaParams kF01{0.1};

// (1+b^2)TP / ((1+b^2)TP + b^2 FN + FP). Named "f1" for beta == 1, otherwise
// "fbeta" with a beta parameter. Throws ParameterError unless beta > 0.
MetricValue f_beta(const ConfusionMatrix& cm, FBetaParams params);

// Weighted harmonic mean of a precision/recall pair; 0 when both are 0.
double f_beta_from_pr(double precision, double recall, double beta);

struct RocPoint {
  double threshold = 0.0;  // +inf / -inf for the synthetic endpoints
  double fpr = 0.0;
  double tpr = 0.0;
};

// Points sorted by threshold descending, framed by (0,0) and (1,1).
struct RocCurve {
  std::vector<RocPoint> points;
};

// Alerting rule: score >= threshold. Duplicate thresholds collapse into one
// point. Throws ParameterError when `thresholds` is empty or the series lacks
// either class, ValidationError for non-finite thresholds.
RocCurve roc(const LabeledSeries& series, const AlertSeries& scored_alerts,
             std::span<const double> thresholds);

// Every distinct score, descending. Used for `--auto` threshold sweeps.
std::vector<double> distinct_scores(const AlertSeries& scored_alerts);

// Trapezoidal area under the curve.
MetricValue auc(const RocCurve& curve);

// Single-configuration simplification 1 - (FPR + FNR) / 2.
MetricValue auc_single(const ConfusionMatrix& cm);

// Mean over attack scenarios of the alerted fraction of each scenario, so
// every scenario weighs the same irrespective of its length.
MetricValue scenario_normalized_recall(const LabeledSeries& series,
                                       const AlertSeries& alerts);

// Shortest round-trip text of a parameter value ("0.1", "1", "2.5").
std::string format_param(double value);

}  // namespace iideval
