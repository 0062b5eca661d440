#pragma once

#include <stdexcept>
#include <string>

namespace lossypdc {

// Bad arguments: wrong shapes, non-unitary transforms, unphysical inputs.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Failures that arise while computing on valid inputs.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The integrator's step-doubling convergence gate was not met.
class StepCountError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// NaN or Inf appeared in the integrator state.
class BlowupError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class CalibrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// A joint mode lives entirely in one partition, so no bipartite mode pair can
// be read off from it.
class PartitionDegeneracyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NormalizationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace lossypdc
