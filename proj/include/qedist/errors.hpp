#pragma once

#include <stdexcept>
#include <string>

namespace qedist {

// Malformed input: bad dimensions, non-Hermitian matrices, invalid parameters.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

// Requested (set, state) combination has no exact tractable formulation,
// e.g. separability questions for general mixed states.
class IntractableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The conic backend did not reach an optimal, certified solution.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qedist
