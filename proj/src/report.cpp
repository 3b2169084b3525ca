#include "iideval/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "iideval/csv.hpp"
#include "iideval/errors.hpp"

namespace iideval {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string fixed(double value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
  return buf;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string markdown_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::string table_csv(const ComparisonTable& t) {
  std::vector<std::string> header{"detector"};
  header.insert(header.end(), t.columns.begin(), t.columns.end());
  std::string out = csv::join_record(header) + "\n";
  for (const auto& row : t.rows) {
    std::vector<std::string> fields{row.detector};
    for (const auto& cell : row.cells) fields.push_back(format_cell(cell, t.precision));
    out += csv::join_record(fields) + "\n";
  }
  return out;
}

std::string table_markdown(const ComparisonTable& t) {
  std::string out = "| detector |";
  for (const auto& c : t.columns) out += " " + markdown_escape(c) + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += "---:|";
  out += "\n";
  for (const auto& row : t.rows) {
    out += "| " + markdown_escape(row.detector) + " |";
    for (const auto& cell : row.cells) out += " " + format_cell(cell, t.precision) + " |";
    out += "\n";
  }
  return out;
}

std::string table_json(const ComparisonTable& t) {
  ordered_json doc;
  doc["dataset"] = t.dataset;
  doc["precision"] = t.precision;
  doc["columns"] = t.columns;
  doc["rows"] = ordered_json::array();
  for (const auto& row : t.rows) {
    ordered_json r;
    r["detector"] = row.detector;
    ordered_json cells = ordered_json::object();
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      cells[t.columns[i]] = optional_number(row.cells[i]);
    }
    r["values"] = std::move(cells);
    doc["rows"].push_back(std::move(r));
  }
  return doc.dump(2) + "\n";
}

// Timeline geometry, in SVG user units.
constexpr double kLabelWidth = 200.0;
constexpr double kPlotWidth = 1000.0;
constexpr double kLaneHeight = 18.0;
constexpr double kLaneGap = 8.0;
constexpr double kTop = 28.0;
constexpr double kAxisHeight = 36.0;
constexpr int kAxisTicks = 5;

std::string rendering_svg(const TimelineRendering& r) {
  const double span = static_cast<double>(std::max<Tick>(1, r.axis_end - r.axis_begin));
  auto x_of = [&](Tick t) {
    return kLabelWidth + static_cast<double>(t - r.axis_begin) / span * kPlotWidth;
  };
  const double lanes_height =
      static_cast<double>(r.lanes.size()) * (kLaneHeight + kLaneGap);
  const double width = kLabelWidth + kPlotWidth + 20.0;
  const double height = kTop + lanes_height + kAxisHeight;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(width, 0) +
         "\" height=\"" + fixed(height, 0) + "\" viewBox=\"0 0 " + fixed(width, 0) +
         " " + fixed(height, 0) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<title>" + xml_escape(r.dataset) + " alert timeline</title>\n";
  out += "<desc>min-width-ticks=" + std::to_string(r.min_width_ticks) +
         " tick-duration-s=" + xml_escape(format_param(r.tick_duration_s)) +
         "</desc>\n";
  out += "<text x=\"" + fixed(kLabelWidth, 3) + "\" y=\"18\">" + xml_escape(r.dataset) +
         "</text>\n";

  for (std::size_t i = 0; i < r.lanes.size(); ++i) {
    const auto& lane = r.lanes[i];
    const double y = kTop + static_cast<double>(i) * (kLaneHeight + kLaneGap);
    const char* fill = lane.ground_truth ? "#d62728" : "#1f77b4";
    out += "<g class=\"lane\" data-label=\"" + xml_escape(lane.label) + "\"" +
           (lane.ground_truth ? " data-ground-truth=\"true\"" : "") +
           (lane.exempt ? " data-exempt=\"true\"" : "") + ">\n";
    out += "<text x=\"" + fixed(kLabelWidth - 8.0, 3) + "\" y=\"" +
           fixed(y + kLaneHeight - 5.0, 3) + "\" text-anchor=\"end\">" +
           xml_escape(lane.label) + "</text>\n";
    out += "<rect x=\"" + fixed(kLabelWidth, 3) + "\" y=\"" + fixed(y, 3) +
           "\" width=\"" + fixed(kPlotWidth, 3) + "\" height=\"" +
           fixed(kLaneHeight, 3) + "\" fill=\"#f2f2f2\"/>\n";
    for (const auto& s : lane.spans) {
      const double x0 = x_of(s.start);
      const double x1 = x_of(s.rendered_end);
      out += "<rect x=\"" + fixed(x0, 3) + "\" y=\"" + fixed(y, 3) + "\" width=\"" +
             fixed(x1 - x0, 3) + "\" height=\"" + fixed(kLaneHeight, 3) +
             "\" fill=\"" + fill + "\"" +
             (s.widened ? " fill-opacity=\"0.6\"" : "") + " data-start=\"" +
             std::to_string(s.start) + "\" data-end=\"" + std::to_string(s.true_end) +
             "\" data-rendered-end=\"" + std::to_string(s.rendered_end) +
             "\" data-widened=\"" + (s.widened ? "true" : "false") + "\"/>\n";
    }
    out += "</g>\n";
  }

  const double axis_y = kTop + lanes_height;
  out += "<g class=\"axis\">\n";
  out += "<line x1=\"" + fixed(kLabelWidth, 3) + "\" y1=\"" + fixed(axis_y, 3) +
         "\" x2=\"" + fixed(kLabelWidth + kPlotWidth, 3) + "\" y2=\"" +
         fixed(axis_y, 3) + "\" stroke=\"#333333\"/>\n";
  for (int k = 0; k <= kAxisTicks; ++k) {
    const double frac = static_cast<double>(k) / kAxisTicks;
    const double x = kLabelWidth + frac * kPlotWidth;
    const double seconds = frac * span * r.tick_duration_s;
    out += "<line x1=\"" + fixed(x, 3) + "\" y1=\"" + fixed(axis_y, 3) + "\" x2=\"" +
           fixed(x, 3) + "\" y2=\"" + fixed(axis_y + 5.0, 3) +
           "\" stroke=\"#333333\"/>\n";
    out += "<text x=\"" + fixed(x, 3) + "\" y=\"" + fixed(axis_y + 18.0, 3) +
           "\" text-anchor=\"middle\">+" + fixed(seconds, 1) + " s</text>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

std::string rendering_json(const TimelineRendering& r) {
  ordered_json doc;
  doc["dataset"] = r.dataset;
  doc["tick_duration_s"] = r.tick_duration_s;
  doc["min_width_ticks"] = r.min_width_ticks;
  doc["axis_begin"] = r.axis_begin;
  doc["axis_end"] = r.axis_end;
  doc["lanes"] = ordered_json::array();
  for (const auto& lane : r.lanes) {
    ordered_json l;
    l["label"] = lane.label;
    l["ground_truth"] = lane.ground_truth;
    l["exempt"] = lane.exempt;
    l["spans"] = ordered_json::array();
    for (const auto& s : lane.spans) {
      l["spans"].push_back({{"start", s.start},
                            {"end", s.true_end},
                            {"rendered_end", s.rendered_end},
                            {"widened", s.widened}});
    }
    doc["lanes"].push_back(std::move(l));
  }
  return doc.dump(2) + "\n";
}

}  // namespace

ComparisonTable build_table(std::span<const MetricReport> reports,
                            std::span<const std::string> metric_keys, int precision) {
  if (precision < 0 || precision > 12) {
    throw ParameterError("table precision must lie in [0, 12]");
  }
  ComparisonTable table;
  table.precision = precision;
  if (reports.empty()) return table;
  table.dataset = reports.front().dataset();
  if (metric_keys.empty()) {
    for (const auto& m : reports.front().metrics()) table.columns.push_back(m.key());
  } else {
    table.columns.assign(metric_keys.begin(), metric_keys.end());
  }
  for (const auto& report : reports) {
    if (report.dataset() != table.dataset) {
      throw ValidationError("cannot tabulate detectors of different datasets ('" +
                            table.dataset + "' and '" + report.dataset() +
                            "'); write one table per dataset");
    }
    ComparisonTable::Row row{report.detector(), {}};
    for (const auto& key : table.columns) {
      const auto* m = report.find(key);
      if (!m) {
        throw ValidationError("report for '" + report.detector() + "' lacks metric '" +
                              key + "'");
      }
      row.cells.push_back(m->value);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void rank_rows(ComparisonTable& table, std::string_view column) {
  const auto it = std::find(table.columns.begin(), table.columns.end(), column);
  if (it == table.columns.end()) {
    throw ParameterError("cannot rank by '" + std::string(column) +
                         "': not a column of the table");
  }
  const auto c = static_cast<std::size_t>(it - table.columns.begin());
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [c](const ComparisonTable::Row& a, const ComparisonTable::Row& b) {
                     const auto& x = a.cells[c];
                     const auto& y = b.cells[c];
                     if (x && y) return *x > *y;
                     return x.has_value() && !y.has_value();
                   });
}

std::string format_cell(const std::optional<double>& value, int precision) {
  if (!value) return std::string(kUndefinedCell);
  return fixed(*value, precision);
}

TimelineRendering render_timeline(const LabeledSeries& series,
                                  std::span<const AlertSeries> alert_sets,
                                  Tick min_width_ticks,
                                  const std::set<std::string>& exempt) {
  if (min_width_ticks < 0) throw ParameterError("minimum width must be non-negative");
  TimelineRendering r;
  r.dataset = series.name();
  r.tick_duration_s = series.tick_duration_s();
  r.min_width_ticks = min_width_ticks;
  r.axis_begin = series.timestamps().front();
  r.axis_end = series.timestamps().back() + 1;

  TimelineLane truth{"ground truth", true, false, {}};
  for (const auto& iv : scenario_ticks(extract_scenarios(series))) {
    truth.spans.push_back({iv.first, iv.last + 1, iv.last + 1, false});
  }
  r.lanes.push_back(std::move(truth));

  for (const auto& alerts : alert_sets) {
    check_aligned(series, alerts);
    TimelineLane lane{alerts.detector(), false, exempt.contains(alerts.detector()), {}};
    const auto points = alerts_to_intervals(alerts.alerts());
    for (const auto& iv : to_tick_intervals(points, series)) {
      RenderedSpan s{iv.first, iv.last + 1, iv.last + 1, false};
      if (!lane.exempt && s.true_end - s.start < min_width_ticks) {
        s.rendered_end = s.start + min_width_ticks;
        s.widened = true;
      }
      r.axis_end = std::max(r.axis_end, s.rendered_end);
      lane.spans.push_back(s);
    }
    r.lanes.push_back(std::move(lane));
  }
  return r;
}

Tick parse_min_width(std::string_view text, double tick_duration_s) {
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  double amount = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, amount);
  if (ec != std::errc{} || ptr == begin || !(amount >= 0.0) || !std::isfinite(amount)) {
    throw ParameterError("invalid minimum width '" + std::string(text) + "'");
  }
  const std::string_view unit(ptr, static_cast<std::size_t>(end - ptr));
  if (unit.empty()) {
    if (amount != std::floor(amount)) {
      throw ParameterError("a bare minimum width counts ticks and must be an integer");
    }
    return static_cast<Tick>(amount);
  }
  double seconds = 0.0;
  if (unit == "ms") {
    seconds = amount / 1000.0;
  } else if (unit == "s") {
    seconds = amount;
  } else if (unit == "m" || unit == "min") {
    seconds = amount * 60.0;
  } else if (unit == "h") {
    seconds = amount * 3600.0;
  } else {
    throw ParameterError("unknown unit '" + std::string(unit) +
                         "' in minimum width; use ms, s, m or h");
  }
  return static_cast<Tick>(std::ceil(seconds / tick_duration_s - 1e-9));
}

ExportFormat parse_format(std::string_view text) {
  if (text == "csv") return ExportFormat::kCsv;
  if (text == "md" || text == "markdown") return ExportFormat::kMarkdown;
  if (text == "json") return ExportFormat::kJson;
  if (text == "svg") return ExportFormat::kSvg;
  throw ParameterError("unknown format '" + std::string(text) +
                       "'; use csv, md, json or svg");
}

std::string_view extension(ExportFormat format) {
  switch (format) {
    case ExportFormat::kCsv: return "csv";
    case ExportFormat::kMarkdown: return "md";
    case ExportFormat::kJson: return "json";
    case ExportFormat::kSvg: return "svg";
  }
  return "";
}

std::string export_table(const ComparisonTable& table, ExportFormat format) {
  switch (format) {
    case ExportFormat::kCsv: return table_csv(table);
    case ExportFormat::kMarkdown: return table_markdown(table);
    case ExportFormat::kJson: return table_json(table);
    case ExportFormat::kSvg: break;
  }
  throw ParameterError("tables cannot be exported as svg; use csv, md or json");
}

std::string export_rendering(const TimelineRendering& rendering, ExportFormat format) {
  switch (format) {
    case ExportFormat::kSvg: return rendering_svg(rendering);
    case ExportFormat::kJson: return rendering_json(rendering);
    case ExportFormat::kCsv:
    case ExportFormat::kMarkdown: break;
  }
  throw ParameterError("timelines export only as svg or json");
}

std::string report_to_json(const MetricReport& report) {
  ordered_json doc;
  doc["dataset"] = report.dataset();
  doc["detector"] = report.detector();
  doc["metrics"] = ordered_json::array();
  for (const auto& m : report.metrics()) {
    ordered_json entry;
    entry["name"] = m.name;
    entry["key"] = m.key();
    ordered_json params = ordered_json::object();
    for (const auto& [k, v] : m.params) params[k] = v;
    entry["params"] = std::move(params);
    entry["value"] = optional_number(m.value);
    doc["metrics"].push_back(std::move(entry));
  }
  doc["tick_duration_s"] = report.tick_duration_s();
  doc["scenarios"] = ordered_json::array();
  for (const auto& d : report.scenario_details()) {
    ordered_json s;
    s["start_index"] = d.scenario.points.first;
    s["end_index"] = d.scenario.points.last;
    s["start_time"] = d.scenario.start_time;
    s["end_time"] = d.scenario.end_time;
    s["attack_type"] = d.scenario.attack_type;
    s["detected"] = d.detected;
    s["first_alert_time"] =
        d.first_alert_time ? ordered_json(*d.first_alert_time) : ordered_json(nullptr);
    s["delay_ticks"] = d.delay_ticks ? ordered_json(*d.delay_ticks) : ordered_json(nullptr);
    s["delay_s"] = d.delay_ticks ? ordered_json(static_cast<double>(*d.delay_ticks) *
                                                report.tick_duration_s())
                                 : ordered_json(nullptr);
    doc["scenarios"].push_back(std::move(s));
  }
  return doc.dump(2) + "\n";
}

std::string roc_to_csv(const RocCurve& curve) {
  std::string out = "threshold,fpr,tpr\n";
  for (const auto& p : curve.points) {
    std::string threshold;
    if (std::isinf(p.threshold)) {
      threshold = p.threshold > 0 ? "+inf" : "-inf";
    } else {
      threshold = format_param(p.threshold);
    }
    out += threshold + "," + format_param(p.fpr) + "," + format_param(p.tpr) + "\n";
  }
  return out;
}

}  // namespace iideval
