#include "iideval/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "iideval/baselines.hpp"
#include "iideval/errors.hpp"
#include "iideval/evaluation.hpp"
#include "iideval/ingest.hpp"
#include "iideval/pointwise.hpp"
#include "iideval/report.hpp"

namespace iideval {
namespace {

namespace fs = std::filesystem;

constexpr const char* kDefaultOutputDir = "iideval-out";

struct RunConfig {
  std::string config;
  std::vector<std::string> alerts;
  std::vector<std::string> detectors;
  std::vector<std::string> metrics;
  std::int64_t gap_tolerance = 0;
  std::string out;
  std::string format;
  std::uint64_t seed = 0;
  std::optional<double> threshold;
  // compare
  std::string rank_by;
  int precision = 3;
  // timeline
  std::string min_width = "0";
  std::vector<std::string> exempt;
  // roc
  std::vector<double> thresholds;
  bool auto_thresholds = false;
};

// One detector source, as loaded.
struct Source {
  AlertSeries alerts;
  std::optional<fs::path> file;  // raw file to copy; baselines have none
};

std::string slug(std::string_view name) {
  std::string out;
  for (char c : name) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_';
    out += keep ? c : '_';
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

void write_file(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw Error("io", "cannot create directory " + path.parent_path().string() +
                                ": " + ec.message());
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error("io", "cannot write " + path.string());
  file.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!file) throw Error("io", "failed writing " + path.string());
}

fs::path output_dir(const RunConfig& cfg, const std::optional<std::string>& env) {
  if (!cfg.out.empty()) return cfg.out;
  if (env && !env->empty()) return *env;
  return kDefaultOutputDir;
}

// "[name=]path"; a bare path keeps the detector name from the file.
std::pair<std::optional<std::string>, fs::path> split_alert_arg(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0) return {std::nullopt, arg};
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

std::vector<Source> load_sources(const RunConfig& cfg, const LabeledSeries& series) {
  std::vector<Source> sources;
  for (const auto& arg : cfg.alerts) {
    auto [name, path] = split_alert_arg(arg);
    sources.push_back({load_alerts(path, series, name), path});
  }
  for (const auto& text : cfg.detectors) {
    if (!is_baseline_name(text)) {
      throw ParameterError("--detector takes baseline specs (baseline:never, "
                           "baseline:always, baseline:random:p=<p>[:seed=<n>]); got '" +
                           text + "'. Pass alert files with --alerts");
    }
    const auto spec = parse_baseline(text, cfg.seed);
    sources.push_back({generate(spec, series), std::nullopt});
  }
  if (sources.empty()) {
    throw ParameterError("no detector given; use --alerts <file> or --detector baseline:...");
  }
  std::set<std::string> seen;
  for (const auto& s : sources) {
    if (!seen.insert(slug(s.alerts.detector())).second) {
      throw ParameterError("duplicate detector name '" + s.alerts.detector() +
                           "'; rename with --alerts <name>=<path>");
    }
  }
  return sources;
}

// Applies --threshold to scored sources; boolean sources pass through.
std::vector<AlertSeries> boolean_alerts(const RunConfig& cfg,
                                        const std::vector<Source>& sources,
                                        std::string_view verb) {
  std::vector<AlertSeries> out;
  for (const auto& s : sources) {
    if (s.alerts.kind() == AlertKind::kScored) {
      if (!cfg.threshold) {
        throw ParameterError("detector '" + s.alerts.detector() +
                             "' has scored alerts; pass --threshold for " +
                             std::string(verb) + " or use `roc`");
      }
      out.push_back(s.alerts.thresholded(*cfg.threshold));
    } else {
      out.push_back(s.alerts);
    }
  }
  return out;
}

void validate_sources(const LabeledSeries& series, std::span<const AlertSeries> alerts,
                      std::ostream& err) {
  for (const auto& a : alerts) {
    const auto report = validate_pair(series, a);
    if (!report.ok()) {
      std::string msg;
      for (const auto& f : report.failures) msg += (msg.empty() ? "" : "; ") + f;
      throw ValidationError(msg);
    }
    for (const auto& w : report.warnings) err << "iideval: warning: " << w << "\n";
  }
}

// Raw detector outputs land next to the reports.
void copy_raw_alerts(const fs::path& out_dir, const LabeledSeries& series,
                     const std::vector<Source>& sources) {
  const fs::path dir = out_dir / "alerts";
  for (const auto& s : sources) {
    const fs::path target = dir / (slug(s.alerts.detector()) + ".jsonl");
    if (s.file) {
      std::error_code ec;
      fs::create_directories(dir, ec);
      fs::copy_file(*s.file, target, fs::copy_options::overwrite_existing, ec);
      if (ec) throw Error("io", "cannot copy " + s.file->string() + " to " +
                                    target.string() + ": " + ec.message());
    } else {
      std::ostringstream buf;
      write_alerts(buf, s.alerts, series);
      write_file(target, buf.str());
    }
  }
}

LabeledSeries load_config_dataset(const RunConfig& cfg) {
  return load_dataset(load_manifest(cfg.config));
}

EvaluationOptions evaluation_options(const RunConfig& cfg) {
  if (cfg.gap_tolerance < 0) throw ParameterError("--gap-tolerance must be >= 0");
  EvaluationOptions options;
  options.gap_tolerance = cfg.gap_tolerance;
  if (cfg.metrics.empty()) {
    options.metrics = default_metrics();
  } else {
    for (const auto& m : cfg.metrics) options.metrics.push_back(parse_metric_request(m));
  }
  // Fail on unknown metrics before any file is read.
  for (const auto& m : options.metrics) MetricCatalog::builtin().resolve(m);
  return options;
}

ExportFormat format_or(const RunConfig& cfg, ExportFormat fallback) {
  return cfg.format.empty() ? fallback : parse_format(cfg.format);
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err,
                 const std::optional<std::string>& env) {
  const auto format = format_or(cfg, ExportFormat::kJson);
  if (format == ExportFormat::kSvg) {
    throw ParameterError("evaluate writes json, csv or md; svg is for `timeline`");
  }
  const auto options = evaluation_options(cfg);
  const auto series = load_config_dataset(cfg);
  const auto sources = load_sources(cfg, series);
  const auto alerts = boolean_alerts(cfg, sources, "evaluate");
  validate_sources(series, alerts, err);
  const auto reports = evaluate_all(series, alerts, options);

  const fs::path dir = output_dir(cfg, env);
  for (const auto& report : reports) {
    std::string content;
    if (format == ExportFormat::kJson) {
      content = report_to_json(report);
    } else {
      content = export_table(build_table(std::span(&report, 1), {}, cfg.precision), format);
    }
    const fs::path path =
        dir / (slug(report.detector()) + ".report." + std::string(extension(format)));
    write_file(path, content);
    out << path.string() << "\n";
  }
  copy_raw_alerts(dir, series, sources);
  return 0;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err,
                const std::optional<std::string>& env) {
  const auto format = format_or(cfg, ExportFormat::kMarkdown);
  if (format == ExportFormat::kSvg) {
    throw ParameterError("compare writes csv, md or json; svg is for `timeline`");
  }
  const auto options = evaluation_options(cfg);
  const auto series = load_config_dataset(cfg);
  const auto sources = load_sources(cfg, series);
  if (sources.size() < 2) {
    throw ParameterError("compare needs at least two detectors");
  }
  const auto alerts = boolean_alerts(cfg, sources, "compare");
  validate_sources(series, alerts, err);
  const auto reports = evaluate_all(series, alerts, options);

  auto table = build_table(reports, {}, cfg.precision);
  if (!cfg.rank_by.empty()) rank_rows(table, cfg.rank_by);

  const fs::path dir = output_dir(cfg, env);
  const fs::path path = dir / ("comparison." + std::string(extension(format)));
  write_file(path, export_table(table, format));
  out << path.string() << "\n";
  copy_raw_alerts(dir, series, sources);
  return 0;
}

int cmd_timeline(const RunConfig& cfg, std::ostream& out, std::ostream& err,
                 const std::optional<std::string>& env) {
  const auto format = format_or(cfg, ExportFormat::kSvg);
  if (format != ExportFormat::kSvg && format != ExportFormat::kJson) {
    throw ParameterError("timeline writes svg or json");
  }
  const auto series = load_config_dataset(cfg);
  const Tick min_width = parse_min_width(cfg.min_width, series.tick_duration_s());
  const auto sources = load_sources(cfg, series);
  const auto alerts = boolean_alerts(cfg, sources, "timeline");
  validate_sources(series, alerts, err);
  const std::set<std::string> exempt(cfg.exempt.begin(), cfg.exempt.end());
  for (const auto& name : exempt) {
    const bool known = std::any_of(alerts.begin(), alerts.end(), [&](const AlertSeries& a) {
      return a.detector() == name;
    });
    if (!known) throw ParameterError("--exempt names unknown detector '" + name + "'");
  }
  const auto rendering = render_timeline(series, alerts, min_width, exempt);

  const fs::path dir = output_dir(cfg, env);
  const fs::path path = dir / ("timeline." + std::string(extension(format)));
  write_file(path, export_rendering(rendering, format));
  out << path.string() << "\n";
  copy_raw_alerts(dir, series, sources);
  return 0;
}

int cmd_roc(const RunConfig& cfg, std::ostream& out, std::ostream&,
            const std::optional<std::string>& env) {
  if (!cfg.format.empty() && parse_format(cfg.format) != ExportFormat::kCsv) {
    throw ParameterError("roc writes csv");
  }
  if (cfg.auto_thresholds == !cfg.thresholds.empty()) {
    throw ParameterError("roc needs exactly one of --thresholds or --auto");
  }
  const auto series = load_config_dataset(cfg);
  const auto sources = load_sources(cfg, series);
  const fs::path dir = output_dir(cfg, env);
  for (const auto& s : sources) {
    if (s.alerts.kind() != AlertKind::kScored) {
      throw ParameterError("detector '" + s.alerts.detector() +
                           "' has boolean alerts; roc needs scores. Use `evaluate` "
                           "(auc-single) for boolean alerts");
    }
    const auto thresholds =
        cfg.auto_thresholds ? distinct_scores(s.alerts) : cfg.thresholds;
    const auto curve = roc(series, s.alerts, thresholds);
    const auto area = auc(curve);
    const fs::path path = dir / ("roc-" + slug(s.alerts.detector()) + ".csv");
    write_file(path, roc_to_csv(curve));
    out << path.string() << "\n";
    out << "auc " << s.alerts.detector() << " " << format_param(*area.value) << "\n";
  }
  copy_raw_alerts(dir, series, sources);
  return 0;
}

int cmd_baseline(const RunConfig& cfg, std::ostream& out, std::ostream&,
                 const std::optional<std::string>& env) {
  if (!cfg.alerts.empty()) throw ParameterError("baseline takes --detector specs only");
  const auto series = load_config_dataset(cfg);
  const auto sources = load_sources(cfg, series);
  const fs::path dir = output_dir(cfg, env);
  copy_raw_alerts(dir, series, sources);
  for (const auto& s : sources) {
    out << (dir / "alerts" / (slug(s.alerts.detector()) + ".jsonl")).string() << "\n";
  }
  return 0;
}

std::string single_line(std::string text) {
  std::string out;
  for (char c : text) {
    if (c == '\n') {
      out += "; ";
    } else if (c != '\r') {
      out += c;
    }
  }
  while (!out.empty() && (out.back() == ' ' || out.back() == ';')) out.pop_back();
  return out;
}

int fail(std::ostream& err, std::string_view kind, const std::string& message, int code) {
  err << "iideval: error[" << kind << "]: " << single_line(message) << "\n";
  return code;
}

void add_common(CLI::App* cmd, RunConfig& cfg, bool metrics) {
  cmd->add_option("--config", cfg.config, "Dataset manifest (JSON)")->required();
  cmd->add_option("--alerts", cfg.alerts, "Alert file, optionally name=path")
      ->delimiter(',');
  cmd->add_option("--detector", cfg.detectors,
                  "Baseline pseudo-detector, e.g. baseline:random:p=0.5:seed=1");
  cmd->add_option("--out", cfg.out,
                  std::string("Output directory (default: $") + kOutputDirEnv + " or " +
                      kDefaultOutputDir + ")");
  cmd->add_option("--format", cfg.format, "csv, md, json or svg");
  cmd->add_option("--seed", cfg.seed, "Seed for baselines without seed=");
  if (metrics) {
    cmd->add_option("--metrics", cfg.metrics, "Metric list, e.g. accuracy,f1,fbeta:beta=0.1")
        ->delimiter(',');
    cmd->add_option("--gap-tolerance", cfg.gap_tolerance,
                    "Merge same-type attack runs split by at most this many benign points");
    cmd->add_option("--precision", cfg.precision, "Decimals in csv/md tables");
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::optional<std::string>& output_dir_env) {
  RunConfig cfg;
  CLI::App app{"Evaluate intrusion-detection alerts against labelled time series"};
  app.name("iideval");
  app.require_subcommand(0, 1);
  bool list_metrics = false;
  app.add_flag("--list-metrics", list_metrics, "Print the metric catalog and exit");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "One metric report per detector");
  add_common(evaluate_cmd, cfg, true);
  evaluate_cmd->add_option("--threshold", cfg.threshold,
                           "Alert threshold for scored alerts (score >= threshold)");

  auto* compare_cmd = app.add_subcommand("compare", "Comparison table of detectors");
  add_common(compare_cmd, cfg, true);
  compare_cmd->add_option("--threshold", cfg.threshold,
                          "Alert threshold for scored alerts (score >= threshold)");
  compare_cmd->add_option("--rank-by", cfg.rank_by, "Sort rows by this metric key");

  auto* timeline_cmd = app.add_subcommand("timeline", "Alert timeline figure");
  add_common(timeline_cmd, cfg, false);
  timeline_cmd->add_option("--threshold", cfg.threshold,
                           "Alert threshold for scored alerts (score >= threshold)");
  timeline_cmd->add_option("--min-width", cfg.min_width,
                           "Minimum drawn width: 60s, 1m, 500ms or ticks");
  timeline_cmd->add_option("--exempt", cfg.exempt, "Detector drawn at true width");

  auto* roc_cmd = app.add_subcommand("roc", "RoC curve points and AuC for scored alerts");
  add_common(roc_cmd, cfg, false);
  roc_cmd->add_option("--thresholds", cfg.thresholds, "Threshold list")->delimiter(',');
  roc_cmd->add_flag("--auto", cfg.auto_thresholds, "Use every distinct score");

  auto* baseline_cmd = app.add_subcommand("baseline", "Write baseline alert files");
  add_common(baseline_cmd, cfg, false);

  std::vector<std::string> storage{"iideval"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return fail(err, "usage", e.what(), 2);
  }

  try {
    if (list_metrics) {
      out << MetricCatalog::builtin().listing();
      return 0;
    }
    if (evaluate_cmd->parsed()) return cmd_evaluate(cfg, out, err, output_dir_env);
    if (compare_cmd->parsed()) return cmd_compare(cfg, out, err, output_dir_env);
    if (timeline_cmd->parsed()) return cmd_timeline(cfg, out, err, output_dir_env);
    if (roc_cmd->parsed()) return cmd_roc(cfg, out, err, output_dir_env);
    if (baseline_cmd->parsed()) return cmd_baseline(cfg, out, err, output_dir_env);
    return fail(err, "usage", "missing command; one of evaluate, compare, timeline, roc, baseline", 2);
  } catch (const ParameterError& e) {
    return fail(err, e.kind(), e.what(), 2);
  } catch (const Error& e) {
    return fail(err, e.kind(), e.what(), 3);
  } catch (const std::exception& e) {
    return fail(err, "internal", e.what(), 4);
  }
}

int run_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::optional<std::string> env;
  if (const char* value = std::getenv(kOutputDirEnv)) env = value;
  return run_cli(args, std::cout, std::cerr, env);
}

}  // namespace iideval
