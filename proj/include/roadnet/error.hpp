#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace roadnet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input values violate a documented precondition (non-finite coordinates,
/// out-of-range thresholds, mismatched dimensions).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The graph relation itself is malformed (self loops, dangling indices).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A file could not be decoded. Carries the 1-based line and the byte offset
/// when the failure can be located.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::optional<std::size_t> line = {},
             std::optional<std::size_t> offset = {})
      : Error(format(what, line, offset)), line_(line), offset_(offset) {}

  std::optional<std::size_t> line() const noexcept { return line_; }
  std::optional<std::size_t> offset() const noexcept { return offset_; }

 private:
  static std::string format(const std::string& what,
                            std::optional<std::size_t> line,
                            std::optional<std::size_t> offset) {
    std::string out = what;
    if (line) out += " (line " + std::to_string(*line);
    if (offset) out += std::string(line ? ", " : " (") + "offset " + std::to_string(*offset);
    if (line || offset) out += ")";
    return out;
  }

  std::optional<std::size_t> line_;
  std::optional<std::size_t> offset_;
};

/// A predictor was asked about a point it has no record for.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Required inputs or options are missing or contradictory.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace roadnet
