#pragma once

#include <stdexcept>
#include <string>

namespace qrom {

/// Malformed or inconsistent scenario / structure description.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An eigensolver or factorization failed to deliver the requested accuracy.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual = -1.0)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Artifact read/write failure (missing file, bad magic, truncated data).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qrom
