#include "iideval/baselines.hpp"

#include <charconv>
#include <cmath>
#include <random>
#include <vector>

#include "iideval/errors.hpp"
#include "iideval/pointwise.hpp"

namespace iideval {
namespace {

constexpr std::string_view kPrefix = "baseline:";

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const auto next = text.find(sep, pos);
    out.push_back(text.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

}  // namespace

std::string BaselineSpec::name() const {
  switch (kind) {
    case BaselineKind::kNever:
      return "baseline:never";
    case BaselineKind::kAlways:
      return "baseline:always";
    case BaselineKind::kRandom:
      return "baseline:random:p=" + format_param(p.value_or(0.0)) +
             ":seed=" + std::to_string(seed);
  }
  return {};
}

bool is_baseline_name(std::string_view text) {
  return text.substr(0, kPrefix.size()) == kPrefix;
}

BaselineSpec parse_baseline(std::string_view text, std::uint64_t default_seed) {
  if (!is_baseline_name(text)) {
    throw ParameterError("not a baseline: '" + std::string(text) + "'");
  }
  const auto parts = split(text.substr(kPrefix.size()), ':');
  BaselineSpec spec;
  spec.seed = default_seed;
  if (parts[0] == "never" && parts.size() == 1) {
    spec.kind = BaselineKind::kNever;
  } else if (parts[0] == "always" && parts.size() == 1) {
    spec.kind = BaselineKind::kAlways;
  } else if (parts[0] == "random") {
    spec.kind = BaselineKind::kRandom;
    for (std::size_t i = 1; i < parts.size(); ++i) {
      const auto eq = parts[i].find('=');
      const auto key = parts[i].substr(0, eq);
      const auto value =
          eq == std::string_view::npos ? std::string_view{} : parts[i].substr(eq + 1);
      const char* begin = value.data();
      const char* end = value.data() + value.size();
      if (key == "p") {
        double p = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, p);
        if (ec != std::errc{} || ptr != end || value.empty()) {
          throw ParameterError("invalid probability in '" + std::string(text) + "'");
        }
        spec.p = p;
      } else if (key == "seed") {
        std::uint64_t seed = 0;
        auto [ptr, ec] = std::from_chars(begin, end, seed);
        if (ec != std::errc{} || ptr != end || value.empty()) {
          throw ParameterError("invalid seed in '" + std::string(text) + "'");
        }
        spec.seed = seed;
      } else {
        throw ParameterError("unknown baseline parameter '" + std::string(key) +
                             "' in '" + std::string(text) + "'");
      }
    }
  } else {
    throw ParameterError("unknown baseline '" + std::string(text) +
                         "'; expected baseline:never, baseline:always or "
                         "baseline:random:p=<prob>:seed=<n>");
  }
  validate(spec);
  return spec;
}

void validate(const BaselineSpec& spec) {
  if (spec.kind == BaselineKind::kRandom) {
    if (!spec.p) throw ParameterError("random baseline needs p");
    if (!(*spec.p >= 0.0 && *spec.p <= 1.0)) {
      throw ParameterError("baseline probability must lie in [0, 1], got " +
                           format_param(*spec.p));
    }
  } else if (spec.p) {
    throw ParameterError("only the random baseline takes p");
  }
}

AlertSeries generate(const BaselineSpec& spec, const LabeledSeries& series) {
  validate(spec);
  std::vector<std::uint8_t> alerts(series.size(), 0);
  switch (spec.kind) {
    case BaselineKind::kNever:
      break;
    case BaselineKind::kAlways:
      std::fill(alerts.begin(), alerts.end(), 1);
      break;
    case BaselineKind::kRandom: {
      std::mt19937_64 engine(spec.seed);
      const double p = *spec.p;
      for (auto& a : alerts) {
        const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
        a = u < p ? 1 : 0;
      }
      break;
    }
  }
  return AlertSeries::boolean(spec.name(), series.name(), std::move(alerts));
}

}  // namespace iideval
