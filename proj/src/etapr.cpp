#include <cmath>
#include <cstdint>

#include "iideval/errors.hpp"
#include "iideval/timeaware.hpp"

namespace iideval {
namespace {

void check_intervals(std::span<const Interval> intervals, const char* what) {
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (intervals[i].last < intervals[i].first ||
        (i > 0 && intervals[i].first <= intervals[i - 1].last)) {
      throw ValidationError(std::string(what) + " must be sorted and disjoint");
    }
  }
}

// Non-zero cell of the anomaly x prediction overlap matrix.
struct Overlap {
  std::size_t anomaly;
  std::size_t prediction;
  std::int64_t points;
  bool active = true;
};

}  // namespace

void validate(const EtaParams& params) {
  if (!(params.theta_p > 0.0 && params.theta_p <= 1.0)) {
    throw ParameterError("theta_p must lie in (0, 1]");
  }
  if (!(params.theta_r > 0.0 && params.theta_r <= 1.0)) {
    throw ParameterError("theta_r must lie in (0, 1]");
  }
}

TimeAwareScores etapr(std::span<const Interval> anomalies,
                      std::span<const Interval> predictions,
                      const EtaParams& params) {
  validate(params);
  check_intervals(anomalies, "anomaly intervals");
  check_intervals(predictions, "prediction intervals");

  // Both lists are sorted, so a sweep finds every intersecting pair.
  std::vector<Overlap> cells;
  std::size_t start = 0;
  for (std::size_t a = 0; a < anomalies.size(); ++a) {
    const auto& anomaly = anomalies[a];
    while (start < predictions.size() && predictions[start].last < anomaly.first) {
      ++start;
    }
    for (std::size_t p = start;
         p < predictions.size() && predictions[p].first <= anomaly.last; ++p) {
      const auto lo = std::max(anomaly.first, predictions[p].first);
      const auto hi = std::min(anomaly.last, predictions[p].last);
      cells.push_back({a, p, hi - lo + 1});
    }
  }

  std::vector<std::int64_t> row(anomalies.size());
  std::vector<std::int64_t> col(predictions.size());
  auto sum_rows = [&] {
    std::fill(row.begin(), row.end(), 0);
    for (const auto& c : cells) {
      if (c.active) row[c.anomaly] += c.points;
    }
  };
  auto sum_cols = [&] {
    std::fill(col.begin(), col.end(), 0);
    for (const auto& c : cells) {
      if (c.active) col[c.prediction] += c.points;
    }
  };
  auto fraction = [](std::int64_t covered, const Interval& iv) {
    return static_cast<double>(covered) / static_cast<double>(iv.length());
  };

  // Drop partial overlaps below the thresholds, alternating anomaly and
  // prediction passes until a full round removes nothing.
  for (;;) {
    sum_rows();
    std::vector<bool> drop_row(anomalies.size(), false);
    bool removed_rows = false;
    for (std::size_t a = 0; a < anomalies.size(); ++a) {
      const double f = fraction(row[a], anomalies[a]);
      if (f < params.theta_r && f != 0.0) {
        drop_row[a] = true;
        removed_rows = true;
      }
    }
    for (auto& c : cells) {
      if (drop_row[c.anomaly]) c.active = false;
    }

    sum_cols();
    std::vector<bool> drop_col(predictions.size(), false);
    bool removed_cols = false;
    for (std::size_t p = 0; p < predictions.size(); ++p) {
      const double f = fraction(col[p], predictions[p]);
      if (f < params.theta_p && f != 0.0) {
        drop_col[p] = true;
        removed_cols = true;
      }
    }
    for (auto& c : cells) {
      if (drop_col[c.prediction]) c.active = false;
    }
    if (!removed_rows && !removed_cols) break;
  }
  sum_rows();
  sum_cols();

  TimeAwareScores out;
  if (!anomalies.empty()) {
    double total = 0.0;
    for (std::size_t a = 0; a < anomalies.size(); ++a) {
      const double portion = std::min(1.0, fraction(row[a], anomalies[a]));
      const double detected = portion >= params.theta_r ? 1.0 : 0.0;
      total += (detected + detected * portion) / 2.0;
    }
    out.recall = total / static_cast<double>(anomalies.size());
  }
  if (!predictions.empty()) {
    double weighted = 0.0;
    double weights = 0.0;
    for (std::size_t p = 0; p < predictions.size(); ++p) {
      const double portion = fraction(col[p], predictions[p]);
      const double detected = portion >= params.theta_p ? 1.0 : 0.0;
      const double w = std::sqrt(static_cast<double>(predictions[p].length()));
      weighted += w * (detected + detected * portion) / 2.0;
      weights += w;
    }
    out.precision = weighted / weights;
  }
  out.f1 = f_beta(out, 1.0);
  return out;
}

}  // namespace iideval
