#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace citefield {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A malformed input record. `line()` is 1-based, 0 when not known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Saved index could not be loaded.
class IndexFormatError : public Error {
 public:
  enum class Kind { Io, BadMagic, Version, Checksum, Truncated };

  IndexFormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// A metric has no defined value for its input (zero denominator and friends).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace citefield
