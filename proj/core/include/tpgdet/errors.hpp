#pragma once

#include <stdexcept>
#include <string>

namespace tpgdet {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Gram matrix factorization failed (numerically singular).
struct SingularGram : Error {
  using Error::Error;
};

// Operation called on an estimator built for a different matrix mode.
struct ModeMismatch : Error {
  using Error::Error;
};

struct ShapeMismatch : Error {
  using Error::Error;
};

// Invalid run configuration; message names the offending field.
struct ConfigError : Error {
  using Error::Error;
};

struct MalformedFile : Error {
  using Error::Error;
};

struct UnknownVersion : Error {
  using Error::Error;
};

struct LengthMismatch : Error {
  using Error::Error;
};

}  // namespace tpgdet
