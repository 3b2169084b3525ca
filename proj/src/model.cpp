#include "iideval/model.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "iideval/errors.hpp"

namespace iideval {

bool is_benign_token(std::string_view token) {
  return token == kBenignLabel || token == "0";
}

LabeledSeries::LabeledSeries(std::string name, std::vector<Tick> timestamps,
                             std::vector<std::uint32_t> label_codes,
                             std::vector<std::string> attack_types,
                             double tick_duration_s)
    : name_(std::move(name)),
      timestamps_(std::move(timestamps)),
      codes_(std::move(label_codes)),
      attack_types_(std::move(attack_types)),
      tick_duration_s_(tick_duration_s) {
  if (timestamps_.empty()) {
    throw ValidationError("series '" + name_ + "' is empty");
  }
  if (timestamps_.size() != codes_.size()) {
    throw ValidationError("series '" + name_ + "': " +
                          std::to_string(timestamps_.size()) +
                          " timestamps but " + std::to_string(codes_.size()) +
                          " labels");
  }
  if (!(tick_duration_s_ > 0.0) || !std::isfinite(tick_duration_s_)) {
    throw ValidationError("series '" + name_ +
                          "': tick duration must be positive and finite");
  }
  for (std::size_t i = 1; i < timestamps_.size(); ++i) {
    if (timestamps_[i] <= timestamps_[i - 1]) {
      throw ValidationError("series '" + name_ +
                            "': timestamps not strictly increasing at index " +
                            std::to_string(i));
    }
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& type : attack_types_) {
    if (type.empty() || is_benign_token(type)) {
      throw ValidationError("series '" + name_ + "': invalid attack type '" +
                            type + "'");
    }
    if (!seen.insert(type).second) {
      throw ValidationError("series '" + name_ + "': duplicate attack type '" +
                            type + "'");
    }
  }
  for (auto code : codes_) {
    if (code > attack_types_.size()) {
      throw ValidationError("series '" + name_ + "': label code out of range");
    }
    if (code != kBenign) ++attack_points_;
  }
}

LabeledSeries LabeledSeries::from_tokens(std::string name,
                                         std::vector<Tick> timestamps,
                                         std::span<const std::string> tokens,
                                         double tick_duration_s) {
  std::vector<std::string> types;
  std::unordered_map<std::string, std::uint32_t> index;
  std::vector<std::uint32_t> codes;
  codes.reserve(tokens.size());
  for (const auto& token : tokens) {
    if (is_benign_token(token)) {
      codes.push_back(kBenign);
      continue;
    }
    auto [it, inserted] =
        index.try_emplace(token, static_cast<std::uint32_t>(types.size() + 1));
    if (inserted) types.push_back(token);
    codes.push_back(it->second);
  }
  return LabeledSeries(std::move(name), std::move(timestamps), std::move(codes),
                       std::move(types), tick_duration_s);
}

LabeledSeries LabeledSeries::from_tokens(std::string name,
                                         std::span<const std::string> tokens,
                                         double tick_duration_s) {
  std::vector<Tick> timestamps(tokens.size());
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    timestamps[i] = static_cast<Tick>(i);
  }
  return from_tokens(std::move(name), std::move(timestamps), tokens,
                     tick_duration_s);
}

std::string_view LabeledSeries::label(std::size_t i) const {
  const auto code = codes_[i];
  return code == kBenign ? kBenignLabel
                         : std::string_view(attack_types_[code - 1]);
}

std::vector<std::uint8_t> LabeledSeries::attack_mask() const {
  std::vector<std::uint8_t> mask(codes_.size());
  std::transform(codes_.begin(), codes_.end(), mask.begin(),
                 [](std::uint32_t c) { return c != kBenign ? 1 : 0; });
  return mask;
}

std::optional<std::size_t> LabeledSeries::index_of(Tick t) const {
  auto it = std::lower_bound(timestamps_.begin(), timestamps_.end(), t);
  if (it == timestamps_.end() || *it != t) return std::nullopt;
  return static_cast<std::size_t>(it - timestamps_.begin());
}

std::string_view to_string(AlertKind kind) {
  return kind == AlertKind::kBoolean ? "boolean" : "scored";
}

AlertSeries AlertSeries::boolean(std::string detector, std::string aligned_to,
                                 std::vector<std::uint8_t> alerts) {
  AlertSeries s;
  s.kind_ = AlertKind::kBoolean;
  s.detector_ = std::move(detector);
  s.aligned_to_ = std::move(aligned_to);
  s.alerts_ = std::move(alerts);
  for (auto& a : s.alerts_) a = a ? 1 : 0;
  return s;
}

AlertSeries AlertSeries::scored(std::string detector, std::string aligned_to,
                                std::vector<double> scores) {
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      throw ValidationError("detector '" + detector +
                            "': non-finite score at index " +
                            std::to_string(i));
    }
  }
  AlertSeries s;
  s.kind_ = AlertKind::kScored;
  s.detector_ = std::move(detector);
  s.aligned_to_ = std::move(aligned_to);
  s.scores_ = std::move(scores);
  return s;
}

std::span<const std::uint8_t> AlertSeries::alerts() const {
  if (kind_ != AlertKind::kBoolean) {
    throw ParameterError("detector '" + detector_ +
                         "' produced scores, not boolean alerts");
  }
  return alerts_;
}

std::span<const double> AlertSeries::scores() const {
  if (kind_ != AlertKind::kScored) {
    throw ParameterError("detector '" + detector_ +
                         "' produced boolean alerts, not scores");
  }
  return scores_;
}

AlertSeries AlertSeries::thresholded(double threshold) const {
  const auto s = scores();
  std::vector<std::uint8_t> mask(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) mask[i] = s[i] >= threshold;
  return boolean(detector_, aligned_to_, std::move(mask));
}

AlertSeries AlertSeries::renamed(std::string detector) const {
  AlertSeries copy = *this;
  copy.detector_ = std::move(detector);
  return copy;
}

void check_aligned(const LabeledSeries& series, const AlertSeries& alerts) {
  if (series.size() != alerts.size()) {
    throw AlignmentError("detector '" + alerts.detector() + "' has " +
                         std::to_string(alerts.size()) +
                         " values but series '" + series.name() + "' has " +
                         std::to_string(series.size()) + " points");
  }
}

std::string MetricValue::key() const {
  std::string out = name;
  for (const auto& [k, v] : params) {
    out += ':';
    out += k;
    if (!v.empty()) {
      out += '=';
      out += v;
    }
  }
  return out;
}

void MetricReport::add(MetricValue metric) {
  if (find(metric.key()) != nullptr) {
    throw ValidationError("duplicate metric '" + metric.key() +
                          "' in report for " + detector_);
  }
  metrics_.push_back(std::move(metric));
}

void MetricReport::set_scenario_details(std::vector<ScenarioDetection> details,
                                        double tick_duration_s) {
  scenario_details_ = std::move(details);
  tick_duration_s_ = tick_duration_s;
}

const MetricValue* MetricReport::find(std::string_view key) const {
  for (const auto& m : metrics_) {
    if (m.key() == key) return &m;
  }
  return nullptr;
}

std::vector<AttackScenario> extract_scenarios(const LabeledSeries& series,
                                              std::int64_t gap_tolerance) {
  if (gap_tolerance < 0) {
    throw ParameterError("gap tolerance must be non-negative");
  }
  const auto codes = series.label_codes();
  const auto ts = series.timestamps();
  const auto n = static_cast<std::int64_t>(codes.size());

  struct Run {
    Interval points;
    std::uint32_t code;
  };
  std::vector<Run> merged;
  for (std::int64_t i = 0; i < n;) {
    const auto code = codes[i];
    std::int64_t j = i;
    while (j + 1 < n && codes[j + 1] == code) ++j;
    if (code != LabeledSeries::kBenign) {
      // Consecutive attack runs have only benign points between them.
      if (!merged.empty() && merged.back().code == code &&
          i - merged.back().points.last - 1 <= gap_tolerance) {
        merged.back().points.last = j;
      } else {
        merged.push_back({{i, j}, code});
      }
    }
    i = j + 1;
  }

  std::vector<AttackScenario> out;
  out.reserve(merged.size());
  for (const auto& run : merged) {
    out.push_back({run.points, ts[run.points.first], ts[run.points.last],
                   series.attack_types()[run.code - 1]});
  }
  return out;
}

std::vector<Interval> alerts_to_intervals(std::span<const std::uint8_t> mask) {
  std::vector<Interval> out;
  const auto n = static_cast<std::int64_t>(mask.size());
  for (std::int64_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    std::int64_t j = i;
    while (j + 1 < n && mask[j + 1]) ++j;
    out.push_back({i, j});
    i = j;
  }
  return out;
}

std::vector<Interval> alerts_to_intervals(const AlertSeries& alerts,
                                          const LabeledSeries& series) {
  check_aligned(series, alerts);
  return alerts_to_intervals(alerts.alerts());
}

std::vector<std::uint8_t> intervals_to_mask(std::span<const Interval> intervals,
                                            std::size_t n) {
  std::vector<std::uint8_t> mask(n, 0);
  for (const auto& iv : intervals) {
    if (iv.first < 0 || iv.last < iv.first ||
        static_cast<std::size_t>(iv.last) >= n) {
      throw ValidationError("interval outside the series");
    }
    std::fill(mask.begin() + iv.first, mask.begin() + iv.last + 1, 1);
  }
  return mask;
}

std::vector<Interval> to_tick_intervals(std::span<const Interval> intervals,
                                        const LabeledSeries& series) {
  const auto ts = series.timestamps();
  std::vector<Interval> out;
  out.reserve(intervals.size());
  for (const auto& iv : intervals) out.push_back({ts[iv.first], ts[iv.last]});
  return out;
}

std::vector<Interval> scenario_points(std::span<const AttackScenario> scenarios) {
  std::vector<Interval> out;
  out.reserve(scenarios.size());
  for (const auto& s : scenarios) out.push_back(s.points);
  return out;
}

std::vector<Interval> scenario_ticks(std::span<const AttackScenario> scenarios) {
  std::vector<Interval> out;
  out.reserve(scenarios.size());
  for (const auto& s : scenarios) out.push_back(s.ticks());
  return out;
}

LabeledSeries collapse_multiclass(
    const LabeledSeries& series,
    const std::optional<std::set<std::string>>& positive_classes) {
  const auto& types = series.attack_types();
  // positive[code] for code 0 (benign) .. types.size()
  std::vector<bool> positive(types.size() + 1, false);
  if (!positive_classes) {
    std::fill(positive.begin() + 1, positive.end(), true);
  } else {
    for (const auto& cls : *positive_classes) {
      if (is_benign_token(cls)) {
        positive[LabeledSeries::kBenign] = true;
        continue;
      }
      auto it = std::find(types.begin(), types.end(), cls);
      if (it == types.end()) {
        throw ParameterError("unknown class '" + cls + "' in series '" +
                             series.name() + "'");
      }
      positive[static_cast<std::size_t>(it - types.begin()) + 1] = true;
    }
  }

  const auto codes = series.label_codes();
  std::vector<std::uint32_t> collapsed(codes.size());
  bool any = false;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    collapsed[i] = positive[codes[i]] ? 1 : LabeledSeries::kBenign;
    any = any || collapsed[i] != LabeledSeries::kBenign;
  }
  std::vector<std::string> alphabet;
  if (any) alphabet.emplace_back(kCollapsedAttackType);
  const auto ts = series.timestamps();
  return LabeledSeries(series.name(), std::vector<Tick>(ts.begin(), ts.end()),
                       std::move(collapsed), std::move(alphabet),
                       series.tick_duration_s());
}

}  // namespace iideval
