#pragma once

#include <stdexcept>
#include <string>

namespace milkspec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text or binary payload (ENVI header, CSV, PPM, JSON).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Inputs parse but are inconsistent: unmatched join keys, duplicates,
/// out-of-range concentrations, missing files.
class DataError : public Error {
 public:
  using Error::Error;
};

/// An analysis cannot proceed on the given values: zero variance, rank
/// deficiency, too few samples, non-convergence.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Invalid pipeline configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace milkspec
