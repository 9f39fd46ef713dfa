#pragma once

#include <stdexcept>
#include <string>

namespace coevo {

// Base for all contract violations raised by the library. Non-fatal runtime
// conditions (miswired atoms, motor type coercion) are logged on the trial
// record instead of thrown.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NonFiniteValue : Error {
  using Error::Error;
};
struct MalformedKey : Error {
  using Error::Error;
};
struct SensorWriteForbidden : Error {
  using Error::Error;
};
struct MotorWriteForbidden : Error {
  using Error::Error;
};
struct ArityMismatch : Error {
  using Error::Error;
};
struct WindowTooShort : Error {
  using Error::Error;
};
struct NoInitiator : Error {
  using Error::Error;
};
struct EmptyTrial : Error {
  using Error::Error;
};
struct UnstableEntries : Error {
  using Error::Error;
};
struct AllZeroWeights : Error {
  using Error::Error;
};
struct DuplicateEntry : Error {
  using Error::Error;
};
struct UnknownScenario : Error {
  using Error::Error;
};
struct ValidationFailure : Error {
  using Error::Error;
};
struct ParseError : Error {
  // line is 1-based; 0 means "no location".
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line(line) {}
  int line = 0;
};

}  // namespace coevo
