#pragma once

#include <stdexcept>
#include <string>

namespace shared_lasso {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape or index violations: length mismatches, out-of-range column ids.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Invalid options or parameter combinations supplied by the caller.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (files, labels, group ids).
class DataError : public Error {
 public:
  using Error::Error;
};

// Process exit codes used by the command line driver.
inline constexpr int kExitOk = 0;
inline constexpr int kExitOther = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitConvergence = 4;

}  // namespace shared_lasso
