#pragma once

#include <stdexcept>
#include <string>

namespace pia {

/// Invalid user-supplied configuration (bad key, bad value, inconsistent
/// dimensions). Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure inside the numerical pipeline (degenerate geometry, empty null
/// space, non-finite inputs). Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pia
