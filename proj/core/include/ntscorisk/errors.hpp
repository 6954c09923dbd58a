#pragma once

#include <stdexcept>
#include <string>

namespace ntscorisk {

// Base of every library error. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user-facing input: malformed files, invalid parameters.
class InputError : public Error {
 public:
  using Error::Error;
};

class BetaOutOfDomain : public InputError {
 public:
  using InputError::InputError;
};

class RhoOutOfDomain : public InputError {
 public:
  using InputError::InputError;
};

class InfeasibleWeights : public InputError {
 public:
  using InputError::InputError;
};

class SingularCovariance : public InputError {
 public:
  using InputError::InputError;
};

class DegenerateSeries : public InputError {
 public:
  using InputError::InputError;
};

// Target return outside the attainable range.
class Infeasible : public InputError {
 public:
  using InputError::InputError;
};

// Numerical failures.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class InversionNotConverged : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RootNotBracketed : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegeneratePortfolio : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EmptyTail : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RhoNearUnity : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ZeroDenominator : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class FitNotConverged : public Error {
 public:
  using Error::Error;
};

}  // namespace ntscorisk
