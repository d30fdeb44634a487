#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace conflict_select {

// Domain violations (unknown candidate, a == b, non-conflicting input where a
// conflicting pair is required) are reported with std::domain_error.

/// Invalid rule or generator configuration.
class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Well-formed input whose content cannot be turned into a profile.
class data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input; carries the 1-based line number.
class parse_error : public std::runtime_error {
 public:
  parse_error(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace conflict_select
