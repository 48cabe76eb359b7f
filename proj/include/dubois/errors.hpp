#pragma once

#include <stdexcept>
#include <string>

namespace dubois {

// Base class for all library errors. Subclasses map onto the failure modes
// of the individual operations so callers can dispatch on type.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input / document problems (CLI exit code 2).
struct SchemaError : Error {
  using Error::Error;
};
struct PeripheralError : Error {
  using Error::Error;
};
struct IndexError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};

// Numeric failures (CLI exit code 3).
struct AntipodeError : Error {
  using Error::Error;
};
struct NoConvergence : Error {
  using Error::Error;
};
struct NotACocycle : Error {
  using Error::Error;
};
struct SingularPoint : Error {
  using Error::Error;
};
struct CentralMeridian : Error {
  using Error::Error;
};
struct RankMismatch : Error {
  using Error::Error;
};
struct NotRegular : Error {
  using Error::Error;
};
struct QuadratureFailure : Error {
  using Error::Error;
};
struct NoPathForTubeSampler : Error {
  using Error::Error;
};
struct FitFailure : Error {
  using Error::Error;
};
struct NonCommuting : Error {
  using Error::Error;
};

}  // namespace dubois
