#pragma once

// Minimal RFC 4180 helpers for single-line records.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iideval::csv {

// Splits one record. Quoted fields may contain commas and doubled quotes but
// not line breaks. Returns nullopt on an unterminated or malformed quote.
std::optional<std::vector<std::string>> split_record(std::string_view line);

// Quotes the field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

std::string join_record(const std::vector<std::string>& fields);

}  // namespace iideval::csv
