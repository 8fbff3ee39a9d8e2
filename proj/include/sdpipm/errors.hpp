#pragma once

#include <stdexcept>
#include <string>

namespace sdpipm {

/// The iterate (or an input matrix) has left the positive definite cone.
class NotPositiveDefiniteError : public std::runtime_error {
 public:
  explicit NotPositiveDefiniteError(const std::string& what)
      : std::runtime_error(what) {}
};

/// The Newton system could not be solved to the required residual.
class SingularHessianError : public std::runtime_error {
 public:
  explicit SingularHessianError(const std::string& what)
      : std::runtime_error(what) {}
};

/// The inner k-by-k system of a low-rank inverse update is singular.
class WoodburyError : public std::runtime_error {
 public:
  explicit WoodburyError(const std::string& what) : std::runtime_error(what) {}
};

class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what)
      : std::invalid_argument(what) {}
};

/// Malformed instance or solution text; carries a 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

/// Instance fails a structural requirement (redundant constraints, bad bounds).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sdpipm
