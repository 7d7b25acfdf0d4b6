#pragma once

#include <stdexcept>
#include <string>

namespace cliqueopt {

/// Base class for all library errors. `exit_code()` is what the CLI returns.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

/// Malformed input: bad indices, dimension mismatches, invalid configs.
class InputError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Non-finite iterate or a violated numeric contract during a run.
class NumericError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// A ground-truth provider could not produce its answer.
class OracleError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

/// A configured resource cap (e.g. clique count) was exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// Operation not available for this kind of input (e.g. L of a non-quadratic term).
class UnsupportedError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cliqueopt
