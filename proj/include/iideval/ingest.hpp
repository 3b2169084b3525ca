#pragma once

// Label CSV and alert JSON-lines ingestion, exact-timestamp alignment and
// dataset validation.
//
// Label CSV:   header `timestamp,label`, one row per point. Timestamps are
//              integer ticks or ISO-8601 instants (converted with the
//              declared tick duration). "benign" or "0" marks benign points;
//              any other string is an opaque attack-type id.
// Alert JSONL: one object per line, {"timestamp": <int|string>,
//              "alert": <bool>} or {"timestamp": ..., "score": <number>},
//              optionally "detector": <string>.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "iideval/model.hpp"

namespace iideval {

struct LabelFileSchema {
  std::string name;  // dataset name; defaults to the file stem when empty
  double tick_duration_s = 1.0;
};

// ISO-8601 "YYYY-MM-DD[Thh:mm[:ss[.fff]]][Z|+hh:mm|-hh:mm]" to ticks since
// the Unix epoch. Throws ParameterError if the instant is not a whole number
// of ticks.
Tick parse_iso8601_ticks(std::string_view text, double tick_duration_s);

// Errors are ParseError (with a 1-based line number) for malformed rows,
// non-increasing or duplicate timestamps and empty files.
LabeledSeries parse_labels(std::istream& in, const std::string& source,
                           const LabelFileSchema& schema);
LabeledSeries load_labels(const std::filesystem::path& path,
                          LabelFileSchema schema);

// Aligns records to `target` by exact timestamp. The kind (boolean or
// scored) follows from the fields. The detector name comes from the records'
// "detector" field, else `default_detector`.
//
// Errors: ParseError for malformed lines, mixed alert/score fields,
// inconsistent detector names or duplicate timestamps; AlignmentError for
// timestamps absent from the labels or labels without a record (the message
// lists the first 10 missing timestamps).
AlertSeries parse_alerts(std::istream& in, const std::string& source,
                         const LabeledSeries& target,
                         const std::string& default_detector);
AlertSeries load_alerts(const std::filesystem::path& path,
                        const LabeledSeries& target,
                        std::optional<std::string> detector = std::nullopt);

// Writers emit integer ticks, so write -> parse reproduces the series.
void write_labels(std::ostream& out, const LabeledSeries& series);
void write_alerts(std::ostream& out, const AlertSeries& alerts,
                  const LabeledSeries& series);

struct DatasetStats {
  std::size_t points = 0;
  std::size_t attack_points = 0;
  double attack_fraction = 0.0;  // attack_points / points
  std::vector<std::string> attack_types;
  std::size_t scenarios = 0;
};

struct ValidationReport {
  DatasetStats stats;
  std::vector<std::string> failures;
  std::vector<std::string> warnings;

  bool ok() const { return failures.empty(); }
};

DatasetStats dataset_stats(const LabeledSeries& series);

// Never throws; every problem is listed in the report.
ValidationReport validate_pair(const LabeledSeries& series,
                               const AlertSeries& alerts);

// Dataset manifest (JSON):
//   {"name": "swat", "labels": "swat_labels.csv", "tick_duration_s": 1}
// Relative label paths resolve against the manifest's directory.
struct DatasetManifest {
  std::string name;
  std::filesystem::path labels;
  double tick_duration_s = 1.0;
};

DatasetManifest load_manifest(const std::filesystem::path& path);
LabeledSeries load_dataset(const DatasetManifest& manifest);

}  // namespace iideval
