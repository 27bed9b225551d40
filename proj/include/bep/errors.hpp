#pragma once

#include <stdexcept>
#include <string>

namespace bep {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated an operation's documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Input contained NaN or infinite samples.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// n1 - n2 has a nonzero mean, so the periodic Poisson problem has no solution.
class ChargeImbalanceError : public Error {
 public:
  using Error::Error;
};

/// The requested norm is infinite (negative-order norm of a field with a mean,
/// or a divergent radial integral).
class InfiniteNormError : public Error {
 public:
  using Error::Error;
};

/// Failures while time stepping. Runs catch these and flush partial output.
class RuntimeFailure : public Error {
 public:
  using Error::Error;
};

class VacuumError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class CflError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class InstabilityError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace bep
