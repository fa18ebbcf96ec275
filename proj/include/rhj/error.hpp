#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rhj {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A path violates the SampledPath invariants.
class InvalidPath : public Error {
 public:
  using Error::Error;
};

/// Tabulated data that must be convex is not.
class NotConvex : public Error {
 public:
  using Error::Error;
};

/// The domain of dependence of the region of interest leaves the grid.
class MarginError : public Error {
 public:
  using Error::Error;
};

/// The lower-bound construction cannot satisfy its gap constraints.
class ConstraintError : public Error {
 public:
  ConstraintError(const std::string& what, int violating_index)
      : Error(what), index_(violating_index) {}
  int violating_index() const noexcept { return index_; }

 private:
  int index_;
};

/// Malformed input file; carries the 1-based line number.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace rhj
