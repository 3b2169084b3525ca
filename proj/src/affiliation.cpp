// Affiliation precision/recall. Every quantity is a closed-form integral of
// a distance survival function over (pieces of) intervals; nothing is
// sampled.

#include <algorithm>
#include <cmath>
#include <limits>

#include "iideval/errors.hpp"
#include "iideval/timeaware.hpp"

namespace iideval {
namespace {

using Piece = std::optional<TimeRange>;

double length(const Piece& r) { return r ? r->end - r->begin : 0.0; }

// Empty (or single-instant) intersections are absent.
Piece intersect(const Piece& a, const Piece& b) {
  if (!a || !b) return std::nullopt;
  TimeRange r{std::max(a->begin, b->begin), std::min(a->end, b->end)};
  if (r.begin >= r.end) return std::nullopt;
  return r;
}

bool subset(const TimeRange& inner, const TimeRange& outer) {
  return inner.begin >= outer.begin && inner.end <= outer.end;
}

struct ThreeWay {
  Piece before;
  Piece inside;
  Piece after;
};

// Splits `i` into the parts before, inside and after `j`.
ThreeWay cut_into_three(const Piece& i, const TimeRange& j) {
  if (!i) return {};
  const Piece inter = intersect(i, j);
  const TimeRange& r = *i;
  if (inter && *inter == r) return {std::nullopt, inter, std::nullopt};
  if (r.end <= j.begin) return {r, inter, std::nullopt};
  if (r.begin >= j.end) return {std::nullopt, inter, r};
  if (r.begin <= j.begin && r.end >= j.end) {
    return {TimeRange{r.begin, inter->begin}, inter, TimeRange{inter->end, r.end}};
  }
  if (r.begin <= j.begin) return {TimeRange{r.begin, inter->begin}, inter, std::nullopt};
  if (r.end >= j.end) return {std::nullopt, inter, TimeRange{inter->end, r.end}};
  throw ValidationError("affiliation: unexpected interval configuration");
}

// Endpoint of `j` closest to `i`; the two must not intersect.
double pivot(const TimeRange& i, const TimeRange& j) {
  if (intersect(i, j)) throw ValidationError("affiliation: pivot of intersecting ranges");
  if (i.end <= j.begin) return j.begin;
  if (i.begin >= j.end) return j.end;
  throw ValidationError("affiliation: range not outside its reference");
}

// Zone of influence of each event: halfway to the neighbouring events, and
// to the range border for the outermost ones.
std::vector<TimeRange> zones_of(std::span<const TimeRange> events,
                                TimeRange range) {
  const auto n = events.size();
  auto stop = [&](std::ptrdiff_t j) {
    return j == -1 ? 2.0 * range.begin - events[0].begin : events[j].end;
  };
  auto start = [&](std::size_t j) {
    return j == n ? 2.0 * range.end - events[n - 1].end : events[j].begin;
  };
  std::vector<TimeRange> zones;
  zones.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    zones.push_back({(stop(static_cast<std::ptrdiff_t>(j) - 1) + start(j)) / 2.0,
                     (stop(static_cast<std::ptrdiff_t>(j)) + start(j + 1)) / 2.0});
  }
  return zones;
}

// Integral over x in `i` (outside `j`) of P(random zone instant is farther
// from j than x).
double precision_outside(const TimeRange& i, const TimeRange& j,
                         const TimeRange& e) {
  if (intersect(i, j)) throw ValidationError("affiliation: I and J intersect");
  if (!subset(j, e) || !subset(i, e)) {
    throw ValidationError("affiliation: range outside its zone");
  }
  const double d_min = std::max(i.begin - j.end, j.begin - i.end);
  const double d_max = std::max(i.end - j.end, j.begin - i.begin);
  const double m = std::min(j.begin - e.begin, e.end - j.end);
  const double a = std::pow(std::min(d_max, m), 2) - std::pow(std::min(d_min, m), 2);
  const double b = std::max(d_max, m) - std::max(d_min, m);
  const double min_piece = (1.0 / 2.0) * a + m * b;

  const double linear_piece = (1.0 / 2.0) * (std::pow(d_max, 2) - std::pow(d_min, 2));
  const double remaining_piece = (j.end - j.begin) * (i.end - i.begin);
  const double delta_i = i.end - i.begin;
  const double delta_e = e.end - e.begin;
  return delta_i - (1.0 / delta_e) * (min_piece + linear_piece + remaining_piece);
}

double precision_integral(const TimeRange& i, const TimeRange& j,
                          const TimeRange& e) {
  const auto parts = cut_into_three(i, j);
  double total = 0.0;
  if (parts.before) total += precision_outside(*parts.before, j, e);
  total += length(parts.inside);
  if (parts.after) total += precision_outside(*parts.after, j, e);
  return total;
}

struct HalfSplit {
  Piece before;
  Piece after;
};

HalfSplit split_at(const Piece& j, double at) {
  if (!j) return {};
  if (at >= j->end) return {j, std::nullopt};
  if (at <= j->begin) return {std::nullopt, j};
  return {TimeRange{j->begin, at}, TimeRange{at, j->end}};
}

// Integral over y in `j` (outside `i`) of P(random zone instant is farther
// from y than the prediction i is).
double recall_outside(const TimeRange& i, const TimeRange& j,
                      const TimeRange& e) {
  const double p = pivot(j, i);
  if (p <= e.begin || p >= e.end) return 0.0;

  const double e_mean = (e.begin + e.end) / 2.0;
  const auto halves = split_at(j, e_mean);
  const auto low = split_at(halves.before, (e.begin + p) / 2.0);
  const auto high = split_at(halves.after, (e.end + p) / 2.0);
  const Piece& before_close_e = low.before;
  const Piece& before_close_i = low.after;
  const Piece& after_close_i = high.before;
  const Piece& after_close_e = high.after;

  auto sq = [](const TimeRange& r) { return r.end * r.end - r.begin * r.begin; };
  auto len = [](const TimeRange& r) { return r.end - r.begin; };

  double total = 0.0;
  if (p >= j.end) {
    if (before_close_e) total += (p - e.begin) * len(*before_close_e);
    if (before_close_i) total += 2 * p * len(*before_close_i) - sq(*before_close_i);
    if (after_close_i) total += 2 * p * len(*after_close_i) - sq(*after_close_i);
    if (after_close_e) total += (e.end + p) * len(*after_close_e) - sq(*after_close_e);
  } else if (p <= j.begin) {
    if (before_close_e) total += sq(*before_close_e) - (e.begin + p) * len(*before_close_e);
    if (before_close_i) total += sq(*before_close_i) - 2 * p * len(*before_close_i);
    if (after_close_i) total += sq(*after_close_i) - 2 * p * len(*after_close_i);
    if (after_close_e) total += (e.end - p) * len(*after_close_e);
  } else {
    throw ValidationError("affiliation: pivot inside the ground-truth piece");
  }
  const double delta_j = j.end - j.begin;
  const double delta_e = e.end - e.begin;
  return delta_j - (1.0 / delta_e) * total;
}

double recall_integral(const TimeRange& i, const Piece& j, const TimeRange& e) {
  const auto parts = cut_into_three(j, i);
  double total = 0.0;
  if (parts.before) total += recall_outside(i, *parts.before, e);
  total += length(parts.inside);
  if (parts.after) total += recall_outside(i, *parts.after, e);
  return total;
}

void check_events(std::span<const TimeRange> events, const char* what) {
  for (std::size_t k = 0; k < events.size(); ++k) {
    if (!(events[k].begin < events[k].end)) {
      throw ValidationError(std::string(what) + " need positive length");
    }
    if (k > 0 && !(events[k - 1].end < events[k].begin)) {
      throw ValidationError(std::string(what) + " must be disjoint and ordered");
    }
  }
}

}  // namespace

AffiliationDetail affiliation_events(std::span<const TimeRange> ground_truth,
                                     std::span<const TimeRange> predictions,
                                     TimeRange range) {
  if (ground_truth.empty()) {
    throw ParameterError("affiliation needs at least one ground-truth event");
  }
  check_events(ground_truth, "ground-truth events");
  check_events(predictions, "predicted events");
  auto inside = [&](const TimeRange& r) { return subset(r, range); };
  if (!std::all_of(ground_truth.begin(), ground_truth.end(), inside) ||
      !std::all_of(predictions.begin(), predictions.end(), inside)) {
    throw ParameterError("affiliation range must include every event");
  }

  AffiliationDetail out;
  out.zones = zones_of(ground_truth, range);

  std::size_t first = 0;
  for (std::size_t z = 0; z < out.zones.size(); ++z) {
    const auto& zone = out.zones[z];
    const auto& event = ground_truth[z];

    // Predictions clipped to this zone, in order.
    while (first < predictions.size() && predictions[first].end < zone.begin) ++first;
    std::vector<TimeRange> local;
    for (std::size_t p = first;
         p < predictions.size() && predictions[p].begin <= zone.end; ++p) {
      if (auto clipped = intersect(predictions[p], zone)) local.push_back(*clipped);
    }

    if (local.empty()) {
      out.zone_precision.push_back(std::nullopt);
      out.zone_recall.push_back(0.0);
      continue;
    }

    double numerator = 0.0;
    double total_length = 0.0;
    for (const auto& piece : local) {
      numerator += precision_integral(piece, event, zone);
      total_length += length(piece);
    }
    out.zone_precision.push_back(numerator / total_length);

    // Recall: split the event among the clipped predictions by proximity.
    const auto sub_zones = zones_of(local, zone);
    double recall_sum = 0.0;
    for (std::size_t k = 0; k < local.size(); ++k) {
      recall_sum += recall_integral(local[k], intersect(event, sub_zones[k]), zone);
    }
    out.zone_recall.push_back(recall_sum / (event.end - event.begin));
  }

  double p_sum = 0.0;
  std::size_t p_count = 0;
  for (const auto& p : out.zone_precision) {
    if (p) {
      p_sum += *p;
      ++p_count;
    }
  }
  if (p_count > 0) out.scores.precision = p_sum / static_cast<double>(p_count);
  double r_sum = 0.0;
  for (double r : out.zone_recall) r_sum += r;
  out.scores.recall = r_sum / static_cast<double>(out.zone_recall.size());
  out.scores.f1 = f_beta(out.scores, 1.0);
  return out;
}

TimeAwareScores affiliation(std::span<const Interval> scenarios,
                            std::span<const Interval> alert_intervals,
                            Interval series_span) {
  auto to_ranges = [](std::span<const Interval> intervals) {
    std::vector<TimeRange> out;
    out.reserve(intervals.size());
    for (const auto& iv : intervals) {
      out.push_back({static_cast<double>(iv.first), static_cast<double>(iv.last + 1)});
    }
    return out;
  };
  const auto gt = to_ranges(scenarios);
  const auto pred = to_ranges(alert_intervals);
  return affiliation_events(
      gt, pred,
      {static_cast<double>(series_span.first), static_cast<double>(series_span.last + 1)})
      .scores;
}

}  // namespace iideval
