#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "iideval/model.hpp"

namespace iideval::testing {

// One character per point: 'b' benign, any other letter an attack type.
inline LabeledSeries series_of(std::string_view labels, std::string name = "test",
                               double tick = 1.0) {
  std::vector<std::string> tokens;
  for (char c : labels) tokens.push_back(c == 'b' ? "benign" : std::string(1, c));
  return LabeledSeries::from_tokens(std::move(name), tokens, tick);
}

// One character per point: '1' alert, anything else quiet.
inline AlertSeries alerts_of(std::string_view mask, std::string detector = "det",
                             std::string aligned_to = "test") {
  std::vector<std::uint8_t> bits;
  for (char c : mask) bits.push_back(c == '1' ? 1 : 0);
  return AlertSeries::boolean(std::move(detector), std::move(aligned_to), std::move(bits));
}

}  // namespace iideval::testing
