#pragma once

#include <stdexcept>
#include <string>

namespace camel {

// Root of the library's exception hierarchy.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file; the message names the offending line where possible.
struct ParseError : Error {
  using Error::Error;
};

// Invalid run configuration: bad flag combination, out-of-range setting.
struct ConfigError : Error {
  using Error::Error;
};

// Structurally invalid arguments: shape mismatch, unknown view id, empty input.
struct ArgumentError : Error {
  using Error::Error;
};

// An evaluation protocol cannot proceed on the given data.
struct ProtocolError : Error {
  using Error::Error;
};

// File could not be opened or written.
struct IoError : Error {
  using Error::Error;
};

// Numerical failure inside an algorithm (failed decomposition, non-finite value).
struct NumericError : Error {
  using Error::Error;
};

// Training produced a non-finite loss; carries the step at which it happened.
class TrainingError : public NumericError {
 public:
  TrainingError(const std::string& what, long step)
      : NumericError(what), step_(step) {}

  long step() const { return step_; }

 private:
  long step_;
};

}  // namespace camel
