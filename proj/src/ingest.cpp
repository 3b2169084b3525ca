#include "iideval/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "iideval/csv.hpp"
#include "iideval/errors.hpp"
#include "iideval/pointwise.hpp"

namespace iideval {
namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

// Iterates lines, stripping a trailing CR. A final empty line is not reported.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(++line_no, line);
    pos = end + 1;
  }
}

std::string_view strip_bom(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  return text;
}

std::optional<Tick> parse_integer(std::string_view text) {
  Tick value = 0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || begin == end) return std::nullopt;
  return value;
}

// Days since 1970-01-01 of a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2 ? 1 : 0;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Tick parse_timestamp(std::string_view text, double tick_duration_s) {
  if (auto ticks = parse_integer(text)) return *ticks;
  return parse_iso8601_ticks(text, tick_duration_s);
}

std::string describe(std::string_view text) {
  return "'" + std::string(text.substr(0, 64)) + "'";
}

}  // namespace

Tick parse_iso8601_ticks(std::string_view text, double tick_duration_s) {
  auto fail = [&]() -> ParameterError {
    return ParameterError("invalid timestamp " + describe(text));
  };
  std::size_t pos = 0;
  auto digits = [&](std::size_t count) -> std::int64_t {
    if (pos + count > text.size()) throw fail();
    std::int64_t v = 0;
    for (std::size_t k = 0; k < count; ++k) {
      const char c = text[pos + k];
      if (c < '0' || c > '9') throw fail();
      v = v * 10 + (c - '0');
    }
    pos += count;
    return v;
  };
  auto expect = [&](char c) {
    if (pos >= text.size() || text[pos] != c) throw fail();
    ++pos;
  };
  const auto year = digits(4);
  expect('-');
  const auto month = digits(2);
  expect('-');
  const auto day = digits(2);
  std::int64_t hour = 0, minute = 0, second = 0;
  std::int64_t frac_num = 0, frac_den = 1;
  if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
    ++pos;
    hour = digits(2);
    expect(':');
    minute = digits(2);
    if (pos < text.size() && text[pos] == ':') {
      ++pos;
      second = digits(2);
      if (pos < text.size() && (text[pos] == '.' || text[pos] == ',')) {
        ++pos;
        const auto start = pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
          if (pos - start < 9) {
            frac_num = frac_num * 10 + (text[pos] - '0');
            frac_den *= 10;
          }
          ++pos;
        }
        if (pos == start) throw fail();
      }
    }
  }
  std::int64_t offset_s = 0;
  if (pos < text.size()) {
    if (text[pos] == 'Z') {
      ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
      const int sign = text[pos] == '-' ? -1 : 1;
      ++pos;
      const auto oh = digits(2);
      if (pos < text.size() && text[pos] == ':') ++pos;
      const auto om = digits(2);
      offset_s = sign * (oh * 3600 + om * 60);
    }
  }
  if (pos != text.size() || month < 1 || month > 12 || day < 1 || day > 31 ||
      hour > 23 || minute > 59 || second > 60) {
    throw fail();
  }
  const auto days = days_from_civil(year, static_cast<unsigned>(month),
                                    static_cast<unsigned>(day));
  const std::int64_t whole = days * 86400 + hour * 3600 + minute * 60 + second - offset_s;
  const long double seconds =
      static_cast<long double>(whole) +
      static_cast<long double>(frac_num) / static_cast<long double>(frac_den);
  const long double ticks = seconds / static_cast<long double>(tick_duration_s);
  const long double rounded = std::round(ticks);
  if (std::fabs(ticks - rounded) > 1e-6L) {
    throw ParameterError("timestamp " + describe(text) +
                         " is not a whole number of ticks of " +
                         format_param(tick_duration_s) + " s");
  }
  return static_cast<Tick>(rounded);
}

LabeledSeries parse_labels(std::istream& in, const std::string& source,
                           const LabelFileSchema& schema) {
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = std::move(buf).str();

  std::vector<Tick> timestamps;
  std::vector<std::string> tokens;
  std::optional<std::size_t> ts_col, label_col;
  std::size_t columns = 0;
  std::size_t last_line = 0;

  for_each_line(strip_bom(text), [&](std::size_t line_no, std::string_view line) {
    last_line = line_no;
    auto fields = csv::split_record(line);
    if (!fields) throw ParseError(source, line_no, "malformed CSV quoting");
    if (line_no == 1) {
      columns = fields->size();
      for (std::size_t c = 0; c < fields->size(); ++c) {
        if ((*fields)[c] == "timestamp") ts_col = c;
        if ((*fields)[c] == "label") label_col = c;
      }
      if (!ts_col || !label_col) {
        throw ParseError(source, line_no,
                         "header must name the columns 'timestamp,label'");
      }
      return;
    }
    if (line.empty()) {
      throw ParseError(source, line_no, "empty row");
    }
    if (fields->size() != columns) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(columns) + " fields, found " +
                           std::to_string(fields->size()));
    }
    Tick t = 0;
    try {
      t = parse_timestamp((*fields)[*ts_col], schema.tick_duration_s);
    } catch (const ParameterError& e) {
      throw ParseError(source, line_no, e.what());
    }
    if (!timestamps.empty() && t <= timestamps.back()) {
      throw ParseError(source, line_no,
                       std::string(t == timestamps.back() ? "duplicate"
                                                          : "non-monotone") +
                           " timestamp " + std::to_string(t) + " after " +
                           std::to_string(timestamps.back()));
    }
    auto& label = (*fields)[*label_col];
    if (label.empty()) throw ParseError(source, line_no, "empty label");
    timestamps.push_back(t);
    tokens.push_back(std::move(label));
  });

  if (last_line == 0) throw ParseError(source, 1, "empty file");
  if (timestamps.empty()) throw ParseError(source, last_line, "no data rows");

  std::string name = schema.name;
  if (name.empty()) name = std::filesystem::path(source).stem().string();
  return LabeledSeries::from_tokens(std::move(name), std::move(timestamps), tokens,
                                    schema.tick_duration_s);
}

LabeledSeries load_labels(const std::filesystem::path& path,
                          LabelFileSchema schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open '" + path.string() + "'");
  if (schema.name.empty()) schema.name = path.stem().string();
  return parse_labels(in, path.string(), schema);
}

AlertSeries parse_alerts(std::istream& in, const std::string& source,
                         const LabeledSeries& target,
                         const std::string& default_detector) {
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = std::move(buf).str();

  const std::size_t n = target.size();
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<std::uint8_t> alerts;
  std::vector<double> scores;
  std::optional<AlertKind> kind;
  std::optional<std::string> detector;
  std::size_t records = 0;

  for_each_line(strip_bom(text), [&](std::size_t line_no, std::string_view line) {
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      throw ParseError(source, line_no, "empty line");
    }
    json record;
    try {
      record = json::parse(line.begin(), line.end());
    } catch (const json::parse_error& e) {
      throw ParseError(source, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) throw ParseError(source, line_no, "expected a JSON object");

    const auto ts_it = record.find("timestamp");
    if (ts_it == record.end()) throw ParseError(source, line_no, "missing 'timestamp'");
    Tick t = 0;
    if (ts_it->is_number_integer()) {
      t = ts_it->get<Tick>();
    } else if (ts_it->is_string()) {
      try {
        t = parse_timestamp(ts_it->get_ref<const std::string&>(),
                            target.tick_duration_s());
      } catch (const ParameterError& e) {
        throw ParseError(source, line_no, e.what());
      }
    } else {
      throw ParseError(source, line_no, "'timestamp' must be an integer or a string");
    }

    const auto alert_it = record.find("alert");
    const auto score_it = record.find("score");
    const bool has_alert = alert_it != record.end();
    const bool has_score = score_it != record.end();
    if (has_alert == has_score) {
      throw ParseError(source, line_no, "expected exactly one of 'alert' or 'score'");
    }
    const AlertKind this_kind = has_alert ? AlertKind::kBoolean : AlertKind::kScored;
    if (!kind) {
      kind = this_kind;
      if (*kind == AlertKind::kBoolean) {
        alerts.assign(n, 0);
      } else {
        scores.assign(n, 0.0);
      }
    } else if (*kind != this_kind) {
      throw ParseError(source, line_no, "mixed 'alert' and 'score' records in one file");
    }

    if (auto det = record.find("detector"); det != record.end()) {
      if (!det->is_string()) throw ParseError(source, line_no, "'detector' must be a string");
      const auto& name = det->get_ref<const std::string&>();
      if (!detector) {
        detector = name;
      } else if (*detector != name) {
        throw ParseError(source, line_no, "detector name changes from '" + *detector +
                                              "' to '" + name + "'");
      }
    }

    const auto index = target.index_of(t);
    if (!index) {
      throw AlignmentError(source + ":" + std::to_string(line_no) + ": timestamp " +
                           std::to_string(t) + " does not occur in labels '" +
                           target.name() + "'");
    }
    if (seen[*index]) {
      throw ParseError(source, line_no, "duplicate timestamp " + std::to_string(t));
    }
    seen[*index] = 1;
    ++records;

    if (has_alert) {
      if (!alert_it->is_boolean()) throw ParseError(source, line_no, "'alert' must be a boolean");
      alerts[*index] = alert_it->get<bool>() ? 1 : 0;
    } else {
      if (!score_it->is_number()) throw ParseError(source, line_no, "'score' must be a number");
      const double s = score_it->get<double>();
      if (!std::isfinite(s)) throw ParseError(source, line_no, "'score' must be finite");
      scores[*index] = s;
    }
  });

  if (records == 0) throw ParseError(source, 1, "empty file");
  if (records != n) {
    std::string missing;
    std::size_t listed = 0;
    for (std::size_t i = 0; i < n && listed < 10; ++i) {
      if (seen[i]) continue;
      missing += (listed++ ? ", " : "") + std::to_string(target.timestamps()[i]);
    }
    throw AlignmentError(source + ": " + std::to_string(n - records) +
                         " label timestamps have no alert record; first missing: " +
                         missing);
  }

  const std::string name = detector.value_or(default_detector);
  if (*kind == AlertKind::kBoolean) {
    return AlertSeries::boolean(name, target.name(), std::move(alerts));
  }
  return AlertSeries::scored(name, target.name(), std::move(scores));
}

AlertSeries load_alerts(const std::filesystem::path& path,
                        const LabeledSeries& target,
                        std::optional<std::string> detector) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open '" + path.string() + "'");
  auto series = parse_alerts(in, path.string(), target, path.stem().string());
  if (detector) return series.renamed(*detector);
  return series;
}

void write_labels(std::ostream& out, const LabeledSeries& series) {
  std::string buf = "timestamp,label\n";
  const auto ts = series.timestamps();
  for (std::size_t i = 0; i < series.size(); ++i) {
    buf += std::to_string(ts[i]);
    buf += ',';
    buf += csv::escape(series.label(i));
    buf += '\n';
  }
  out << buf;
}

void write_alerts(std::ostream& out, const AlertSeries& alerts,
                  const LabeledSeries& series) {
  check_aligned(series, alerts);
  const std::string detector = json(alerts.detector()).dump();
  const auto ts = series.timestamps();
  std::string buf;
  for (std::size_t i = 0; i < series.size(); ++i) {
    buf += "{\"timestamp\":";
    buf += std::to_string(ts[i]);
    if (alerts.kind() == AlertKind::kBoolean) {
      buf += alerts.alerts()[i] ? ",\"alert\":true" : ",\"alert\":false";
    } else {
      buf += ",\"score\":";
      buf += format_param(alerts.scores()[i]);
    }
    buf += ",\"detector\":";
    buf += detector;
    buf += "}\n";
  }
  out << buf;
}

DatasetStats dataset_stats(const LabeledSeries& series) {
  DatasetStats s;
  s.points = series.size();
  s.attack_points = series.attack_point_count();
  s.attack_fraction =
      static_cast<double>(s.attack_points) / static_cast<double>(s.points);
  s.attack_types = series.attack_types();
  s.scenarios = extract_scenarios(series).size();
  return s;
}

ValidationReport validate_pair(const LabeledSeries& series,
                               const AlertSeries& alerts) {
  ValidationReport report;
  report.stats = dataset_stats(series);
  if (alerts.size() != series.size()) {
    report.failures.push_back("alignment: detector '" + alerts.detector() + "' has " +
                              std::to_string(alerts.size()) + " values, series has " +
                              std::to_string(series.size()));
  }
  if (alerts.aligned_to() != series.name()) {
    report.warnings.push_back("detector '" + alerts.detector() +
                              "' was aligned to '" + alerts.aligned_to() +
                              "', not '" + series.name() + "'");
  }
  if (alerts.kind() == AlertKind::kScored) {
    const auto s = alerts.scores();
    const auto bad = std::find_if(s.begin(), s.end(),
                                  [](double v) { return !std::isfinite(v); });
    if (bad != s.end()) {
      report.failures.push_back("non-finite score at index " +
                                std::to_string(bad - s.begin()));
    }
  }
  if (series.attack_types().size() > 1) {
    report.warnings.push_back(std::to_string(series.attack_types().size()) +
                              " attack types; point-based metrics use the "
                              "collapsed binary labels");
  }
  if (report.stats.scenarios == 0) {
    report.warnings.push_back("no scenarios; time-aware metrics undefined");
  }
  if (report.stats.attack_points == report.stats.points) {
    report.warnings.push_back("no benign points; TNR, FPR and RoC undefined");
  }
  return report;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  const auto text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 1, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError(path.string(), 1, "manifest must be a JSON object");
  DatasetManifest m;
  try {
    m.labels = doc.at("labels").get<std::string>();
    m.name = doc.value("name", std::string{});
    m.tick_duration_s = doc.value("tick_duration_s", 1.0);
  } catch (const json::exception& e) {
    throw ParseError(path.string(), 1, e.what());
  }
  if (!(m.tick_duration_s > 0.0)) {
    throw ParseError(path.string(), 1, "tick_duration_s must be positive");
  }
  if (m.labels.is_relative()) m.labels = path.parent_path() / m.labels;
  if (m.name.empty()) m.name = m.labels.stem().string();
  return m;
}

LabeledSeries load_dataset(const DatasetManifest& manifest) {
  return load_labels(manifest.labels, {manifest.name, manifest.tick_duration_s});
}

}  // namespace iideval
