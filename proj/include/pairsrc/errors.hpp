#pragma once

#include <stdexcept>
#include <string>

namespace pairsrc {

// Wavelength or temperature outside a dispersion model's validity window.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Phase matching or root finding has no solution for the given inputs.
class NoSolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments or violated type invariants.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Two sampled grids that must coincide do not.
class GridMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical procedure failed (fit residuals, event budget, ...).
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pairsrc
