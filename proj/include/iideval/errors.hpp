#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iideval {

// Base for every error the toolkit raises. `kind()` is a short stable token
// used as the machine-parsable prefix of CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Malformed input file. Carries the 1-based line number that failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : Error("parse", path + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Labels and alerts (or two alert sets) that do not line up point for point.
class AlignmentError : public Error {
 public:
  explicit AlignmentError(const std::string& message)
      : Error("alignment", message) {}
};

// A metric, baseline or rendering parameter outside its admissible range.
class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& message)
      : Error("parameter", message) {}
};

// Structurally invalid in-memory data (e.g. unsorted timestamps).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error("validation", message) {}
};

}  // namespace iideval
