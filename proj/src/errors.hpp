#pragma once

#include <stdexcept>
#include <string>

namespace sdg {

/// Rejected run configuration (bad parameter file, inconsistent mesh, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A flow state left the admissible set (nonpositive density or pressure).
struct InvalidStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A communication contract was broken (length mismatch, unexpected message).
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sdg
