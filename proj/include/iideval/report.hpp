#pragma once

// Comparison tables, alert timelines and their file encodings. Every writer
// is byte-deterministic: stable ordering, fixed number formatting and no
// embedded clock values.

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iideval/model.hpp"
#include "iideval/pointwise.hpp"

namespace iideval {

// Cell text for Undefined values.
inline constexpr std::string_view kUndefinedCell = "—";

struct ComparisonTable {
  struct Row {
    std::string detector;
    std::vector<std::optional<double>> cells;
  };

  std::string dataset;
  std::vector<std::string> columns;  // metric keys
  std::vector<Row> rows;
  int precision = 3;
};

// Rows follow report order. Columns are `metric_keys`, or the first
// report's metric keys when empty. Throws ValidationError for reports on
// different datasets or lacking a selected metric.
ComparisonTable build_table(std::span<const MetricReport> reports,
                            std::span<const std::string> metric_keys = {},
                            int precision = 3);

// Stable sort by one column, descending, Undefined last. Throws
// ParameterError when the column does not exist.
void rank_rows(ComparisonTable& table, std::string_view column);

std::string format_cell(const std::optional<double>& value, int precision);

struct RenderedSpan {
  Tick start = 0;
  Tick true_end = 0;      // exclusive
  Tick rendered_end = 0;  // exclusive, >= true_end
  bool widened = false;
};

struct TimelineLane {
  std::string label;
  bool ground_truth = false;
  bool exempt = false;
  std::vector<RenderedSpan> spans;
};

struct TimelineRendering {
  std::string dataset;
  double tick_duration_s = 1.0;
  Tick min_width_ticks = 0;
  Tick axis_begin = 0;
  Tick axis_end = 0;  // exclusive
  std::vector<TimelineLane> lanes;  // ground truth first, then detectors
};

// A point at tick t covers [t, t + 1). Detector spans narrower than
// `min_width_ticks` are extended to the right to that width unless the
// detector is in `exempt`; the ground-truth lane is never widened. Throws
// AlignmentError if an alert set does not match the series.
TimelineRendering render_timeline(const LabeledSeries& series,
                                  std::span<const AlertSeries> alert_sets,
                                  Tick min_width_ticks,
                                  const std::set<std::string>& exempt = {});

// "60s", "1m", "2h", "500ms" or a bare tick count such as "60".
Tick parse_min_width(std::string_view text, double tick_duration_s);

enum class ExportFormat { kCsv, kMarkdown, kJson, kSvg };

// Accepts csv, md/markdown, json, svg.
ExportFormat parse_format(std::string_view text);
std::string_view extension(ExportFormat format);

// Tables support csv, markdown and json; renderings svg and json. Other
// pairs throw ParameterError.
std::string export_table(const ComparisonTable& table, ExportFormat format);
std::string export_rendering(const TimelineRendering& rendering, ExportFormat format);

// Report JSON: dataset, detector, metrics [{name, key, params, value|null}],
// scenarios [{start_index, end_index, start_time, end_time, attack_type,
// detected, first_alert_time|null, delay_ticks|null, delay_s|null}].
std::string report_to_json(const MetricReport& report);

// threshold,fpr,tpr rows; endpoint thresholds print as +inf / -inf.
std::string roc_to_csv(const RocCurve& curve);

}  // namespace iideval
