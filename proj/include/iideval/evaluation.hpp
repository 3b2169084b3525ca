#pragma once

// Metric catalog and the evaluation pipeline that fills MetricReports.
//
// Metrics are requested by name with optional ":key=value" parameters, e.g.
// "fbeta:beta=0.1", "etapr:theta_r=0.5" or "detected-scenarios:by-type".
// New metrics register an Entry without touching the command-line front end.

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iideval/model.hpp"

namespace iideval {

struct MetricRequest {
  std::string name;
  MetricParams params;  // as written, in order

  bool has(std::string_view key) const;
  const std::string* get(std::string_view key) const;
  // Throws ParameterError if present but not a finite number.
  std::optional<double> number(std::string_view key) const;
};

// Throws ParameterError on empty names or malformed parameters.
MetricRequest parse_metric_request(std::string_view text);

// Everything a metric needs, computed once per (series, detector).
struct EvaluationContext {
  EvaluationContext(const LabeledSeries& series, const AlertSeries& alerts,
                    std::int64_t gap_tolerance);

  const LabeledSeries& series;  // original labels, possibly multi-class
  LabeledSeries binary;         // collapsed labels for point-based metrics
  AlertSeries alerts;           // boolean
  std::vector<AttackScenario> scenarios;  // merged with gap_tolerance
  // Runs of the binary labels (merged with gap_tolerance): touching
  // scenarios of different types form one event for eTaPR and affiliation.
  std::vector<Interval> events;
  std::vector<Interval> alert_points;     // alert runs, point indices
  std::vector<Interval> alert_ticks;      // alert runs, ticks
  ConfusionMatrix cm;
};

class MetricCatalog {
 public:
  using Evaluator = std::function<void(const EvaluationContext&,
                                       const MetricRequest&, MetricReport&)>;

  struct Entry {
    std::string name;
    std::string summary;
    std::vector<std::string> params;  // accepted parameter keys
    Evaluator evaluate;
  };

  static const MetricCatalog& builtin();

  void add(Entry entry);
  void alias(std::string alias, std::string target);

  // Resolves aliases. Throws ParameterError listing the catalog when unknown,
  // or naming the accepted keys when a parameter is not recognised.
  const Entry& resolve(const MetricRequest& request) const;

  std::vector<std::string> names() const;
  // One line per metric: name, parameters, summary.
  std::string listing() const;

 private:
  std::vector<Entry> entries_;
  std::map<std::string, std::string, std::less<>> aliases_;
};

struct EvaluationOptions {
  std::vector<MetricRequest> metrics;
  std::int64_t gap_tolerance = 0;
};

// The full catalog in a fixed order: every point-based metric, F0.1,
// scenario-normalised recall, detected scenarios (instances and types),
// detection delay, eTaPR and affiliation.
std::vector<MetricRequest> default_metrics();

// Throws on unknown metrics, AlignmentError on length mismatch and
// ParameterError for scored alerts (threshold them first).
MetricReport evaluate(const LabeledSeries& series, const AlertSeries& alerts,
                      const EvaluationOptions& options,
                      const MetricCatalog& catalog = MetricCatalog::builtin());

// One report per detector in input order; detectors run concurrently.
std::vector<MetricReport> evaluate_all(
    const LabeledSeries& series, std::span<const AlertSeries> detectors,
    const EvaluationOptions& options,
    const MetricCatalog& catalog = MetricCatalog::builtin());

}  // namespace iideval
