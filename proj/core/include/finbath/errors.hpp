#pragma once

#include <stdexcept>
#include <string>

namespace finbath {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Non-finite numbers, malformed density matrices, out-of-range parameters.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A matrix that should obey the two-level map/generator relations does not.
class StructuralViolation : public Error {
 public:
  using Error::Error;
};

class NonFiniteDerivative : public Error {
 public:
  using Error::Error;
};

class ZeroCoupling : public Error {
 public:
  using Error::Error;
};

class ResonantDenominator : public Error {
 public:
  using Error::Error;
};

class BathTooLarge : public Error {
 public:
  using Error::Error;
};

// A point in time where the requested quantity is undefined. Carries the
// offending time so that callers can report gaps.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, double t) : Error(what), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

// |det Phi_t| vanished: the generator Phi' Phi^{-1} does not exist.
class SingularMap : public SingularityError {
 public:
  using SingularityError::SingularityError;
};

// alpha_t == eta_t in the central spin model.
class DegenerateRates : public SingularityError {
 public:
  using SingularityError::SingularityError;
};

// A coherence factor (delta_t or Lambda(t)) vanished.
class SingularCoherence : public SingularityError {
 public:
  using SingularityError::SingularityError;
};

class BlochOriginSingularity : public SingularityError {
 public:
  using SingularityError::SingularityError;
};

// Scenario configuration problems. `path` is a dotted field path such as
// "params.gamma".
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace finbath
