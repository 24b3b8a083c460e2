#pragma once

#include <stdexcept>
#include <string>

namespace qlgc {

/// Bad input: malformed data, violated preconditions, inconsistent dimensions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A physically or numerically invalid object was handed to an operation
/// that requires validity (non-unitary target, integrator breakdown).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DistinctFrequencyError : public InputError {
 public:
  using InputError::InputError;
};

class NonUnitaryError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StiffnessError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace qlgc
