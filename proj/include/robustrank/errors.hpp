#pragma once

#include <stdexcept>
#include <string>

namespace robustrank {

// Malformed or out-of-range input data or parameters.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Operand sizes do not agree.
class DimensionError : public InputError {
 public:
  explicit DimensionError(const std::string& what) : InputError(what) {}
};

// A perturbation request has no feasible realization under the given limits.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace robustrank
