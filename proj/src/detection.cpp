#include <algorithm>
#include <map>

#include "iideval/errors.hpp"
#include "iideval/pointwise.hpp"
#include "iideval/timeaware.hpp"

namespace iideval {
namespace {

// First alert interval intersecting `target`, given sorted disjoint alerts.
const Interval* first_overlap(std::span<const Interval> alerts,
                              const Interval& target) {
  auto it = std::lower_bound(
      alerts.begin(), alerts.end(), target.first,
      [](const Interval& a, std::int64_t value) { return a.last < value; });
  if (it == alerts.end() || it->first > target.last) return nullptr;
  return &*it;
}

void check_sorted(std::span<const Interval> intervals) {
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (intervals[i].last < intervals[i].first ||
        (i > 0 && intervals[i].first <= intervals[i - 1].last)) {
      throw ValidationError("alert intervals must be sorted and disjoint");
    }
  }
}

}  // namespace

std::optional<double> f_beta(const TimeAwareScores& scores, double beta) {
  if (!(beta > 0.0)) throw ParameterError("beta must be positive");
  if (!scores.precision || !scores.recall) return std::nullopt;
  return f_beta_from_pr(*scores.precision, *scores.recall, beta);
}

DetectedScenarios detected_scenarios(std::span<const AttackScenario> scenarios,
                                     std::span<const Interval> alert_ticks,
                                     bool group_by_type) {
  check_sorted(alert_ticks);
  DetectedScenarios out;
  out.ratio.name = "detected-scenarios";
  if (group_by_type) out.ratio.params.emplace_back("by-type", "");
  out.detected.reserve(scenarios.size());
  for (const auto& s : scenarios) {
    out.detected.push_back(first_overlap(alert_ticks, s.ticks()) != nullptr);
  }
  if (scenarios.empty()) return out;

  if (!group_by_type) {
    const auto hits = std::count(out.detected.begin(), out.detected.end(), true);
    out.ratio.value =
        static_cast<double>(hits) / static_cast<double>(scenarios.size());
    return out;
  }
  std::map<std::string, bool> by_type;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    by_type[scenarios[i].attack_type] |= out.detected[i];
  }
  std::size_t hits = 0;
  for (const auto& [type, hit] : by_type) hits += hit ? 1 : 0;
  out.ratio.value = static_cast<double>(hits) / static_cast<double>(by_type.size());
  return out;
}

DelaySummary detection_delay(std::span<const AttackScenario> scenarios,
                             std::span<const Interval> alert_ticks) {
  check_sorted(alert_ticks);
  DelaySummary out;
  std::vector<Tick> delays;
  for (const auto& s : scenarios) {
    ScenarioDetection d{s, false, std::nullopt, std::nullopt};
    if (const Interval* hit = first_overlap(alert_ticks, s.ticks())) {
      d.detected = true;
      d.first_alert_time = std::max(hit->first, s.start_time);
      d.delay_ticks = *d.first_alert_time - s.start_time;
      delays.push_back(*d.delay_ticks);
    } else {
      ++out.undetected;
    }
    out.details.push_back(std::move(d));
  }
  if (delays.empty()) return out;

  double sum = 0.0;
  for (auto d : delays) sum += static_cast<double>(d);
  out.mean_ticks = sum / static_cast<double>(delays.size());

  std::sort(delays.begin(), delays.end());
  const auto mid = delays.size() / 2;
  out.median_ticks = delays.size() % 2 == 1
                         ? static_cast<double>(delays[mid])
                         : (static_cast<double>(delays[mid - 1]) +
                            static_cast<double>(delays[mid])) / 2.0;
  return out;
}

}  // namespace iideval
