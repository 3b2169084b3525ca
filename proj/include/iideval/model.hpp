#pragma once

// Canonical data types shared by every module: ground-truth series, detector
// output, attack scenarios and metric results.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace iideval {

// Integer time unit of a series. Converted to seconds with the series'
// declared tick duration only when results are reported.
using Tick = std::int64_t;

// Label token reserved for benign points. "0" is accepted as a synonym on
// input but never stored.
inline constexpr std::string_view kBenignLabel = "benign";

// Type assigned to every positive point by collapse_multiclass.
inline constexpr std::string_view kCollapsedAttackType = "attack";

bool is_benign_token(std::string_view token);

// Closed interval [first, last] over point indices or ticks.
struct Interval {
  std::int64_t first = 0;
  std::int64_t last = 0;

  std::int64_t length() const { return last - first + 1; }
  bool overlaps(const Interval& other) const {
    return first <= other.last && other.first <= last;
  }
  friend bool operator==(const Interval&, const Interval&) = default;
};

class LabeledSeries {
 public:
  // Label code 0 is benign; code k > 0 names attack_types[k - 1].
  static constexpr std::uint32_t kBenign = 0;

  // Throws ValidationError unless timestamps are strictly increasing, sizes
  // match, the series is non-empty, every code is in range, the alphabet has
  // unique non-empty entries and the tick duration is positive.
  LabeledSeries(std::string name, std::vector<Tick> timestamps,
                std::vector<std::uint32_t> label_codes,
                std::vector<std::string> attack_types,
                double tick_duration_s = 1.0);

  // Builds the alphabet from label tokens in order of first appearance.
  static LabeledSeries from_tokens(std::string name,
                                   std::vector<Tick> timestamps,
                                   std::span<const std::string> tokens,
                                   double tick_duration_s = 1.0);

  // Convenience for in-memory data: timestamps are 0..n-1.
  static LabeledSeries from_tokens(std::string name,
                                   std::span<const std::string> tokens,
                                   double tick_duration_s = 1.0);

  const std::string& name() const { return name_; }
  double tick_duration_s() const { return tick_duration_s_; }
  std::size_t size() const { return timestamps_.size(); }

  std::span<const Tick> timestamps() const { return timestamps_; }
  std::span<const std::uint32_t> label_codes() const { return codes_; }
  const std::vector<std::string>& attack_types() const { return attack_types_; }

  bool is_attack(std::size_t i) const { return codes_[i] != kBenign; }
  std::string_view label(std::size_t i) const;
  std::size_t attack_point_count() const { return attack_points_; }

  // At most one attack type: the form point-based metrics require.
  bool is_binary() const { return attack_types_.size() <= 1; }

  // Per-point attack mask (1 = attack).
  std::vector<std::uint8_t> attack_mask() const;

  // Index of `t` in timestamps, if present.
  std::optional<std::size_t> index_of(Tick t) const;

 private:
  std::string name_;
  std::vector<Tick> timestamps_;
  std::vector<std::uint32_t> codes_;
  std::vector<std::string> attack_types_;
  double tick_duration_s_;
  std::size_t attack_points_ = 0;
};

enum class AlertKind { kBoolean, kScored };

std::string_view to_string(AlertKind kind);

class AlertSeries {
 public:
  static AlertSeries boolean(std::string detector, std::string aligned_to,
                             std::vector<std::uint8_t> alerts);
  // Throws ValidationError on NaN or infinite scores.
  static AlertSeries scored(std::string detector, std::string aligned_to,
                            std::vector<double> scores);

  AlertKind kind() const { return kind_; }
  const std::string& detector() const { return detector_; }
  const std::string& aligned_to() const { return aligned_to_; }
  std::size_t size() const {
    return kind_ == AlertKind::kBoolean ? alerts_.size() : scores_.size();
  }

  // Boolean view; throws ParameterError for scored series.
  std::span<const std::uint8_t> alerts() const;
  // Score view; throws ParameterError for boolean series.
  std::span<const double> scores() const;

  // Alert rule score >= threshold; ties alarm.
  AlertSeries thresholded(double threshold) const;

  AlertSeries renamed(std::string detector) const;

 private:
  AlertSeries() = default;

  AlertKind kind_ = AlertKind::kBoolean;
  std::string detector_;
  std::string aligned_to_;
  std::vector<std::uint8_t> alerts_;
  std::vector<double> scores_;
};

// Throws AlignmentError when lengths differ.
void check_aligned(const LabeledSeries& series, const AlertSeries& alerts);

struct AttackScenario {
  Interval points;  // inclusive point indices
  Tick start_time = 0;
  Tick end_time = 0;
  std::string attack_type;

  Interval ticks() const { return {start_time, end_time}; }
  friend bool operator==(const AttackScenario&, const AttackScenario&) = default;
};

struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

using MetricParams = std::vector<std::pair<std::string, std::string>>;

// A named metric result. An empty `value` means Undefined: the metric's
// denominator vanished. Undefined is never replaced by 0 or NaN.
struct MetricValue {
  std::string name;
  std::optional<double> value;
  MetricParams params;

  bool defined() const { return value.has_value(); }
  // "name" or "name:k1=v1:k2=v2" in parameter insertion order. A parameter
  // with an empty value is a flag and renders as ":k".
  std::string key() const;
};

struct ScenarioDetection {
  AttackScenario scenario;
  bool detected = false;
  std::optional<Tick> first_alert_time;
  std::optional<Tick> delay_ticks;
};

class MetricReport {
 public:
  MetricReport(std::string dataset, std::string detector)
      : dataset_(std::move(dataset)), detector_(std::move(detector)) {}

  const std::string& dataset() const { return dataset_; }
  const std::string& detector() const { return detector_; }
  const std::vector<MetricValue>& metrics() const { return metrics_; }
  const std::vector<ScenarioDetection>& scenario_details() const {
    return scenario_details_;
  }
  double tick_duration_s() const { return tick_duration_s_; }

  // Throws ValidationError if a metric with the same key already exists.
  void add(MetricValue metric);
  void set_scenario_details(std::vector<ScenarioDetection> details,
                            double tick_duration_s);

  const MetricValue* find(std::string_view key) const;

 private:
  std::string dataset_;
  std::string detector_;
  std::vector<MetricValue> metrics_;
  std::vector<ScenarioDetection> scenario_details_;
  double tick_duration_s_ = 1.0;
};

// Maximal runs of identically-typed attack points, sorted by start. Runs of
// one type separated by at most `gap_tolerance` benign points are merged;
// adjacent runs of different types stay distinct.
std::vector<AttackScenario> extract_scenarios(const LabeledSeries& series,
                                              std::int64_t gap_tolerance = 0);

// Maximal runs of raised alerts as inclusive index intervals.
std::vector<Interval> alerts_to_intervals(std::span<const std::uint8_t> mask);
std::vector<Interval> alerts_to_intervals(const AlertSeries& alerts,
                                          const LabeledSeries& series);

// Inverse of alerts_to_intervals.
std::vector<std::uint8_t> intervals_to_mask(std::span<const Interval> intervals,
                                            std::size_t n);

// Maps index intervals to [timestamps[first], timestamps[last]].
std::vector<Interval> to_tick_intervals(std::span<const Interval> intervals,
                                        const LabeledSeries& series);

std::vector<Interval> scenario_points(std::span<const AttackScenario> scenarios);
std::vector<Interval> scenario_ticks(std::span<const AttackScenario> scenarios);

// Binary view of a multi-class series. Points whose class is in
// `positive_classes` become kCollapsedAttackType, the rest benign. The benign
// class itself may be named to invert the roles. Defaults to all attack
// types. Throws ParameterError on a class outside the series' alphabet.
LabeledSeries collapse_multiclass(
    const LabeledSeries& series,
    const std::optional<std::set<std::string>>& positive_classes = std::nullopt);

}  // namespace iideval
