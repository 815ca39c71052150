#pragma once

#include <stdexcept>
#include <string>

namespace dkt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

/// Malformed ETS text. `line()` is 1-based, 0 when the error is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

/// (J J^T) is not positive definite, so the manipulability gradient is undefined.
class SingularGram : public Error {
 public:
  using Error::Error;
};

/// Roll-pitch-yaw rate matrix is singular (|cos beta| too small).
class RpySingularity : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class NotRedundant : public Error {
 public:
  using Error::Error;
};

class LinearSolveFailure : public Error {
 public:
  using Error::Error;
};

class UnsupportedOrder : public Error {
 public:
  using Error::Error;
};

}  // namespace dkt
