#pragma once

#include <stdexcept>
#include <string>

namespace lpq {

// Base of every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonFiniteError : Error {
  using Error::Error;
};

struct SolverFailure : Error {
  using Error::Error;
};

struct ShapeMismatch : Error {
  using Error::Error;
};

struct Diverged : Error {
  using Error::Error;
};

struct FormatError : Error {
  using Error::Error;
};

struct MissingArtifact : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace lpq
