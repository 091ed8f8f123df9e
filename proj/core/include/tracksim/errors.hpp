#pragma once

#include <stdexcept>
#include <string>

namespace tracksim {

// Base class for all recoverable simulation/planning failures.
class SimError : public std::runtime_error {
 public:
  explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

class DegenerateSprocketError : public SimError {
 public:
  explicit DegenerateSprocketError(double w)
      : SimError("sprocket speed " + std::to_string(w) +
                 " rad/s too close to zero, contact time undefined") {}
};

class GimbalLockError : public SimError {
 public:
  explicit GimbalLockError(double pitch)
      : SimError("pitch " + std::to_string(pitch) + " rad within 1e-6 of +/-pi/2") {}
};

class OutOfTerrainError : public SimError {
 public:
  OutOfTerrainError(double x, double y)
      : SimError("query (" + std::to_string(x) + ", " + std::to_string(y) +
                 ") outside terrain support") {}
};

class NumericalDivergenceError : public SimError {
 public:
  explicit NumericalDivergenceError(const std::string& what)
      : SimError("numerical divergence: " + what) {}
};

class AlphaUndefinedError : public SimError {
 public:
  explicit AlphaUndefinedError(double vx)
      : SimError("slip angle undefined at |vx| = " + std::to_string(vx) + " m/s") {}
};

class AlphaOutOfRangeError : public SimError {
 public:
  explicit AlphaOutOfRangeError(double alpha)
      : SimError("slip angle " + std::to_string(alpha) + " rad outside (-pi/2, pi/2)") {}
};

class DegenerateNormalError : public SimError {
 public:
  DegenerateNormalError() : SimError("heading projection degenerate on terrain plane") {}
};

class ImplicitNonconvergenceError : public SimError {
 public:
  explicit ImplicitNonconvergenceError(double residual)
      : SimError("implicit stage iteration stalled at residual " + std::to_string(residual)) {}
};

class InsufficientDataError : public SimError {
 public:
  explicit InsufficientDataError(const std::string& what) : SimError(what) {}
};

class ModelArityMismatchError : public SimError {
 public:
  explicit ModelArityMismatchError(const std::string& what) : SimError(what) {}
};

class DegenerateFitError : public SimError {
 public:
  explicit DegenerateFitError(const std::string& what) : SimError(what) {}
};

class InfeasibleError : public SimError {
 public:
  explicit InfeasibleError(const std::string& what) : SimError(what) {}
};

class FitNonconvergenceError : public SimError {
 public:
  explicit FitNonconvergenceError(const std::string& what) : SimError(what) {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tracksim
