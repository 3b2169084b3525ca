#include "iideval/pointwise.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "iideval/errors.hpp"

namespace iideval {
namespace {

MetricValue ratio(std::string name, std::uint64_t num, std::uint64_t den) {
  MetricValue m{std::move(name), std::nullopt, {}};
  if (den != 0) m.value = static_cast<double>(num) / static_cast<double>(den);
  return m;
}

}  // namespace

ConfusionMatrix confusion(std::span<const std::uint8_t> truth,
                          std::span<const std::uint8_t> alerts) {
  if (truth.size() != alerts.size()) {
    throw AlignmentError("labels have " + std::to_string(truth.size()) +
                         " points but alerts have " +
                         std::to_string(alerts.size()));
  }
  // Branch-free tally; index = 2 * attack + alert.
  std::uint64_t counts[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++counts[(truth[i] ? 2 : 0) + (alerts[i] ? 1 : 0)];
  }
  return {.tp = counts[3], .tn = counts[0], .fp = counts[1], .fn = counts[2]};
}

ConfusionMatrix confusion(const LabeledSeries& series, const AlertSeries& alerts) {
  check_aligned(series, alerts);
  if (!series.is_binary()) {
    throw ValidationError("series '" + series.name() + "' has " +
                          std::to_string(series.attack_types().size()) +
                          " attack types; collapse it before point-based scoring");
  }
  const auto codes = series.label_codes();
  const auto a = alerts.alerts();
  std::uint64_t counts[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < codes.size(); ++i) {
    ++counts[(codes[i] != LabeledSeries::kBenign ? 2 : 0) + (a[i] ? 1 : 0)];
  }
  return {.tp = counts[3], .tn = counts[0], .fp = counts[1], .fn = counts[2]};
}

MetricValue tpr(const ConfusionMatrix& cm) { return ratio("tpr", cm.tp, cm.tp + cm.fn); }
MetricValue fnr(const ConfusionMatrix& cm) { return ratio("fnr", cm.fn, cm.tp + cm.fn); }
MetricValue tnr(const ConfusionMatrix& cm) { return ratio("tnr", cm.tn, cm.tn + cm.fp); }
MetricValue fpr(const ConfusionMatrix& cm) { return ratio("fpr", cm.fp, cm.fp + cm.tn); }
MetricValue ppv(const ConfusionMatrix& cm) { return ratio("ppv", cm.tp, cm.tp + cm.fp); }
MetricValue npv(const ConfusionMatrix& cm) { return ratio("npv", cm.tn, cm.tn + cm.fn); }
MetricValue accuracy(const ConfusionMatrix& cm) {
  return ratio("accuracy", cm.tp + cm.tn, cm.total());
}

MetricValue f_beta(const ConfusionMatrix& cm, FBetaParams params) {
  if (!(params.beta > 0.0) || !std::isfinite(params.beta)) {
    throw ParameterError("beta must be a positive finite number, got " +
                         format_param(params.beta));
  }
  MetricValue m;
  if (params.beta == 1.0) {
    m.name = "f1";
  } else {
    m.name = "fbeta";
    m.params.emplace_back("beta", format_param(params.beta));
  }
  const double b2 = params.beta * params.beta;
  const double tp = static_cast<double>(cm.tp);
  const double num = (1.0 + b2) * tp;
  const double den = num + b2 * static_cast<double>(cm.fn) +
                     static_cast<double>(cm.fp);
  if (den > 0.0) m.value = num / den;
  return m;
}

double f_beta_from_pr(double precision, double recall, double beta) {
  const double b2 = beta * beta;
  const double den = b2 * precision + recall;
  if (den == 0.0) return 0.0;
  return (1.0 + b2) * precision * recall / den;
}

RocCurve roc(const LabeledSeries& series, const AlertSeries& scored_alerts,
             std::span<const double> thresholds) {
  check_aligned(series, scored_alerts);
  const auto scores = scored_alerts.scores();
  if (thresholds.empty()) {
    throw ParameterError("RoC needs at least one threshold");
  }
  for (double t : thresholds) {
    if (!std::isfinite(t)) throw ValidationError("non-finite RoC threshold");
  }
  const std::uint64_t positives = series.attack_point_count();
  const std::uint64_t negatives = series.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw ParameterError("RoC needs both attack and benign points in '" +
                         series.name() + "'");
  }

  std::vector<double> sorted_thresholds(thresholds.begin(), thresholds.end());
  std::sort(sorted_thresholds.begin(), sorted_thresholds.end(), std::greater<>());
  sorted_thresholds.erase(
      std::unique(sorted_thresholds.begin(), sorted_thresholds.end()),
      sorted_thresholds.end());

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  curve.points.push_back({kInf, 0.0, 0.0});
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::size_t next = 0;
  for (double threshold : sorted_thresholds) {
    while (next < order.size() && scores[order[next]] >= threshold) {
      if (series.is_attack(order[next])) {
        ++tp;
      } else {
        ++fp;
      }
      ++next;
    }
    curve.points.push_back({threshold,
                            static_cast<double>(fp) / static_cast<double>(negatives),
                            static_cast<double>(tp) / static_cast<double>(positives)});
  }
  curve.points.push_back({-kInf, 1.0, 1.0});
  return curve;
}

std::vector<double> distinct_scores(const AlertSeries& scored_alerts) {
  const auto s = scored_alerts.scores();
  std::vector<double> out(s.begin(), s.end());
  std::sort(out.begin(), out.end(), std::greater<>());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

MetricValue auc(const RocCurve& curve) {
  MetricValue m{"auc", std::nullopt, {}};
  if (curve.points.size() < 2) return m;
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  m.value = area;
  return m;
}

MetricValue auc_single(const ConfusionMatrix& cm) {
  MetricValue m{"auc-single", std::nullopt, {}};
  const auto fp_rate = fpr(cm);
  const auto fn_rate = fnr(cm);
  if (fp_rate.defined() && fn_rate.defined()) {
    m.value = 1.0 - (*fp_rate.value + *fn_rate.value) / 2.0;
  }
  return m;
}

MetricValue scenario_normalized_recall(const LabeledSeries& series,
                                       const AlertSeries& alerts) {
  check_aligned(series, alerts);
  const auto a = alerts.alerts();
  const auto scenarios = extract_scenarios(series);
  MetricValue m{"scenario-recall", std::nullopt, {}};
  if (scenarios.empty()) return m;
  double sum = 0.0;
  for (const auto& s : scenarios) {
    std::int64_t hit = 0;
    for (auto i = s.points.first; i <= s.points.last; ++i) hit += a[i] ? 1 : 0;
    sum += static_cast<double>(hit) / static_cast<double>(s.points.length());
  }
  m.value = sum / static_cast<double>(scenarios.size());
  return m;
}

std::string format_param(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

}  // namespace iideval
