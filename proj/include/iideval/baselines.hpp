#pragma once

// Reference detectors: never alarm, always alarm, and a seeded coin flip per
// point.
//
// The random baseline draws one 64-bit word per point from std::mt19937_64
// (fully specified by the C++ standard) seeded with `seed`, maps it to
// u = (word >> 11) * 2^-53 in [0, 1) and alarms iff u < p. Any implementation
// following these two lines reproduces the same alerts bit for bit.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "iideval/model.hpp"

namespace iideval {

enum class BaselineKind { kNever, kAlways, kRandom };

struct BaselineSpec {
  BaselineKind kind = BaselineKind::kNever;
  std::optional<double> p;  // random only
  std::uint64_t seed = 0;

  // Canonical pseudo-detector name, e.g. "baseline:random:p=0.5:seed=1".
  std::string name() const;
};

// True for strings starting with "baseline:".
bool is_baseline_name(std::string_view text);

// Parses "baseline:never", "baseline:always" or
// "baseline:random:p=<prob>[:seed=<n>]". A missing seed takes
// `default_seed`. Throws ParameterError on anything else.
BaselineSpec parse_baseline(std::string_view text, std::uint64_t default_seed = 0);

// Throws ParameterError if p is missing for random, present otherwise, or
// outside [0, 1].
void validate(const BaselineSpec& spec);

AlertSeries generate(const BaselineSpec& spec, const LabeledSeries& series);

}  // namespace iideval
