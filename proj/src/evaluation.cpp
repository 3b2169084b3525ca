#include "iideval/evaluation.hpp"

#include <charconv>
#include <cmath>
#include <future>

#include "iideval/errors.hpp"
#include "iideval/pointwise.hpp"
#include "iideval/timeaware.hpp"

namespace iideval {
namespace {

MetricValue with_params(MetricValue m, const MetricRequest& request,
                        std::initializer_list<std::string_view> keep) {
  for (auto key : keep) {
    if (const auto* v = request.get(key)) m.params.emplace_back(std::string(key), *v);
  }
  return m;
}

MetricValue named(std::string name, std::optional<double> value) {
  return {std::move(name), value, {}};
}

using Ratio = MetricValue (*)(const ConfusionMatrix&);

MetricCatalog::Entry ratio_entry(std::string name, std::string summary, Ratio fn) {
  return {std::move(name), std::move(summary), {},
          [fn](const EvaluationContext& ctx, const MetricRequest&, MetricReport& r) {
            r.add(fn(ctx.cm));
          }};
}

void add_time_aware(MetricReport& report, const MetricRequest& request,
                    const TimeAwareScores& scores, const std::string& prefix,
                    const std::string& precision, const std::string& recall,
                    std::initializer_list<std::string_view> keep) {
  report.add(with_params(named(prefix + precision, scores.precision), request, keep));
  report.add(with_params(named(prefix + recall, scores.recall), request, keep));
  report.add(with_params(named(prefix + "f1", scores.f1), request, keep));
  if (auto beta = request.number("beta")) {
    if (!(*beta > 0.0)) throw ParameterError("beta must be positive");
    MetricValue m = named(prefix + "fbeta", f_beta(scores, *beta));
    m = with_params(std::move(m), request, keep);
    m.params.emplace_back("beta", format_param(*beta));
    report.add(std::move(m));
  }
}

MetricCatalog make_builtin() {
  MetricCatalog c;
  c.add(ratio_entry("tpr", "recall, TP / (TP + FN)", &tpr));
  c.add(ratio_entry("fnr", "miss rate, FN / (TP + FN)", &fnr));
  c.add(ratio_entry("tnr", "specificity, TN / (TN + FP)", &tnr));
  c.add(ratio_entry("fpr", "fall-out, FP / (FP + TN)", &fpr));
  c.add(ratio_entry("ppv", "precision, TP / (TP + FP)", &ppv));
  c.add(ratio_entry("npv", "TN / (TN + FN)", &npv));
  c.add(ratio_entry("accuracy", "(TP + TN) / n", &accuracy));
  c.add(ratio_entry("auc-single", "single-configuration AuC, 1 - (FPR + FNR) / 2",
                    &auc_single));
  c.add({"f1", "2TP / (2TP + FP + FN)", {},
         [](const EvaluationContext& ctx, const MetricRequest&, MetricReport& r) {
           r.add(f_beta(ctx.cm, kF1));
         }});
  c.add({"fbeta", "F-beta from counts; beta weighs recall against precision",
         {"beta"},
         [](const EvaluationContext& ctx, const MetricRequest& req, MetricReport& r) {
           const auto beta = req.number("beta");
           if (!beta) throw ParameterError("fbeta needs beta, e.g. fbeta:beta=0.1");
           r.add(f_beta(ctx.cm, {*beta}));
         }});
  c.add({"scenario-recall", "mean alerted fraction per scenario", {},
         [](const EvaluationContext& ctx, const MetricRequest&, MetricReport& r) {
           r.add(scenario_normalized_recall(ctx.series, ctx.alerts));
         }});
  c.add({"detected-scenarios",
         "fraction of scenarios hit by >= 1 alert; by-type counts attack types",
         {"by-type"},
         [](const EvaluationContext& ctx, const MetricRequest& req, MetricReport& r) {
           r.add(detected_scenarios(ctx.scenarios, ctx.alert_ticks, req.has("by-type"))
                     .ratio);
         }});
  c.add({"detection-delay",
         "mean and median delay (s) over detected scenarios, undetected count", {},
         [](const EvaluationContext& ctx, const MetricRequest&, MetricReport& r) {
           const auto summary = detection_delay(ctx.scenarios, ctx.alert_ticks);
           const double tick = ctx.series.tick_duration_s();
           auto seconds = [tick](std::optional<double> ticks) -> std::optional<double> {
             if (!ticks) return std::nullopt;
             return *ticks * tick;
           };
           r.add(named("detection-delay-mean", seconds(summary.mean_ticks)));
           r.add(named("detection-delay-median", seconds(summary.median_ticks)));
           r.add(named("undetected-scenarios", static_cast<double>(summary.undetected)));
         }});
  c.add({"etapr", "enhanced time-series-aware precision, recall and F1",
         {"theta_p", "theta_r", "beta"},
         [](const EvaluationContext& ctx, const MetricRequest& req, MetricReport& r) {
           EtaParams params;
           if (auto v = req.number("theta_p")) params.theta_p = *v;
           if (auto v = req.number("theta_r")) params.theta_r = *v;
           const auto scores =
               etapr(ctx.events, ctx.alert_points, params);
           add_time_aware(r, req, scores, "eta", "p", "r", {"theta_p", "theta_r"});
         }});
  c.add({"affiliation", "affiliation precision, recall and F1", {"beta"},
         [](const EvaluationContext& ctx, const MetricRequest& req, MetricReport& r) {
           TimeAwareScores scores;
           if (!ctx.events.empty()) {
             scores = affiliation(ctx.events, ctx.alert_points,
                                  {0, static_cast<std::int64_t>(ctx.series.size()) - 1});
           }
           add_time_aware(r, req, scores, "aff-", "precision", "recall", {});
         }});
  c.alias("recall", "tpr");
  c.alias("precision", "ppv");
  return c;
}

}  // namespace

const MetricCatalog& MetricCatalog::builtin() {
  static const MetricCatalog catalog = make_builtin();
  return catalog;
}

bool MetricRequest::has(std::string_view key) const { return get(key) != nullptr; }

const std::string* MetricRequest::get(std::string_view key) const {
  for (const auto& [k, v] : params) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::optional<double> MetricRequest::number(std::string_view key) const {
  const auto* v = get(key);
  if (!v) return std::nullopt;
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc{} || ptr != v->data() + v->size() || v->empty() ||
      !std::isfinite(out)) {
    throw ParameterError("parameter '" + std::string(key) + "' of '" + name +
                         "' is not a number: '" + *v + "'");
  }
  return out;
}

MetricRequest parse_metric_request(std::string_view text) {
  MetricRequest req;
  std::size_t pos = text.find(':');
  req.name = std::string(text.substr(0, pos));
  if (req.name.empty()) throw ParameterError("empty metric name in '" + std::string(text) + "'");
  while (pos != std::string_view::npos) {
    const auto next = text.find(':', pos + 1);
    const auto part = text.substr(pos + 1, next == std::string_view::npos
                                               ? std::string_view::npos
                                               : next - pos - 1);
    const auto eq = part.find('=');
    const auto key = part.substr(0, eq);
    if (key.empty()) throw ParameterError("empty parameter in '" + std::string(text) + "'");
    const auto value = eq == std::string_view::npos ? std::string_view{} : part.substr(eq + 1);
    if (eq != std::string_view::npos && value.empty()) {
      throw ParameterError("parameter '" + std::string(key) + "' has no value in '" +
                           std::string(text) + "'");
    }
    if (req.has(key)) {
      throw ParameterError("parameter '" + std::string(key) + "' repeated in '" +
                           std::string(text) + "'");
    }
    req.params.emplace_back(std::string(key), std::string(value));
    pos = next;
  }
  return req;
}

EvaluationContext::EvaluationContext(const LabeledSeries& series_in,
                                     const AlertSeries& alerts_in,
                                     std::int64_t gap_tolerance)
    : series(series_in),
      binary(collapse_multiclass(series_in)),
      alerts(alerts_in),
      scenarios(extract_scenarios(series_in, gap_tolerance)),
      events(scenario_points(extract_scenarios(binary, gap_tolerance))) {
  check_aligned(series, alerts);
  if (alerts.kind() != AlertKind::kBoolean) {
    throw ParameterError("detector '" + alerts.detector() +
                         "' produced scores; choose a threshold or use `roc`");
  }
  alert_points = alerts_to_intervals(alerts.alerts());
  alert_ticks = to_tick_intervals(alert_points, series);
  cm = confusion(binary, alerts);
}

void MetricCatalog::add(Entry entry) {
  for (const auto& e : entries_) {
    if (e.name == entry.name) throw ParameterError("metric '" + entry.name + "' registered twice");
  }
  entries_.push_back(std::move(entry));
}

void MetricCatalog::alias(std::string alias, std::string target) {
  aliases_.emplace(std::move(alias), std::move(target));
}

const MetricCatalog::Entry& MetricCatalog::resolve(const MetricRequest& request) const {
  std::string_view name = request.name;
  if (auto it = aliases_.find(name); it != aliases_.end()) name = it->second;
  for (const auto& e : entries_) {
    if (e.name != name) continue;
    for (const auto& [k, v] : request.params) {
      if (std::find(e.params.begin(), e.params.end(), k) == e.params.end()) {
        std::string accepted;
        for (const auto& p : e.params) accepted += (accepted.empty() ? "" : ", ") + p;
        throw ParameterError("metric '" + e.name + "' has no parameter '" + k +
                             "' (accepted: " + (accepted.empty() ? "none" : accepted) +
                             ")");
      }
    }
    return e;
  }
  std::string valid;
  for (const auto& n : names()) valid += (valid.empty() ? "" : ", ") + n;
  throw ParameterError("unknown metric '" + request.name + "'; valid metrics: " + valid);
}

std::vector<std::string> MetricCatalog::names() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.name);
  for (const auto& [alias, target] : aliases_) out.push_back(alias);
  return out;
}

std::string MetricCatalog::listing() const {
  std::string out;
  for (const auto& e : entries_) {
    out += e.name;
    for (const auto& p : e.params) out += " [:" + p + (p == "by-type" ? "" : "=..") + "]";
    out += "  -- " + e.summary + "\n";
  }
  for (const auto& [alias, target] : aliases_) {
    out += alias + "  -- alias of " + target + "\n";
  }
  return out;
}

std::vector<MetricRequest> default_metrics() {
  std::vector<MetricRequest> out;
  for (const char* text :
       {"tpr", "fnr", "tnr", "fpr", "ppv", "npv", "accuracy", "f1", "fbeta:beta=0.1",
        "auc-single", "scenario-recall", "detected-scenarios",
        "detected-scenarios:by-type", "detection-delay", "etapr:beta=0.1",
        "affiliation:beta=0.1"}) {
    out.push_back(parse_metric_request(text));
  }
  return out;
}

MetricReport evaluate(const LabeledSeries& series, const AlertSeries& alerts,
                      const EvaluationOptions& options, const MetricCatalog& catalog) {
  // Resolve first so a bad request fails before any work.
  std::vector<const MetricCatalog::Entry*> entries;
  for (const auto& req : options.metrics) entries.push_back(&catalog.resolve(req));

  const EvaluationContext ctx(series, alerts, options.gap_tolerance);
  MetricReport report(series.name(), alerts.detector());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    entries[i]->evaluate(ctx, options.metrics[i], report);
  }
  report.set_scenario_details(detection_delay(ctx.scenarios, ctx.alert_ticks).details,
                              series.tick_duration_s());
  return report;
}

std::vector<MetricReport> evaluate_all(const LabeledSeries& series,
                                       std::span<const AlertSeries> detectors,
                                       const EvaluationOptions& options,
                                       const MetricCatalog& catalog) {
  for (const auto& req : options.metrics) catalog.resolve(req);
  std::vector<std::future<MetricReport>> jobs;
  jobs.reserve(detectors.size());
  for (const auto& d : detectors) {
    jobs.push_back(std::async(std::launch::async, [&series, &d, &options, &catalog] {
      return evaluate(series, d, options, catalog);
    }));
  }
  std::vector<MetricReport> out;
  out.reserve(jobs.size());
  for (auto& job : jobs) out.push_back(job.get());
  return out;
}

}  // namespace iideval
