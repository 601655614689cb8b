#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace shellflux {

struct ZeroFrequency : std::invalid_argument {
  ZeroFrequency() : std::invalid_argument("Leray projection requires a nonzero frequency") {}
};

struct GridTooCoarse : std::runtime_error {
  int needed;
  int given;
  GridTooCoarse(int needed_, int given_)
      : std::runtime_error("grid of " + std::to_string(given_) +
                           " points per dimension cannot resolve the request (need >= " +
                           std::to_string(needed_) + ")"),
        needed(needed_), given(given_) {}
};

struct BudgetExceeded : std::runtime_error {
  std::uint64_t estimated;
  std::uint64_t budget;
  BudgetExceeded(std::uint64_t estimated_, std::uint64_t budget_)
      : std::runtime_error("estimated " + std::to_string(estimated_) +
                           " pair evaluations exceed the budget of " + std::to_string(budget_)),
        estimated(estimated_), budget(budget_) {}
};

struct NonpositiveTarget : std::invalid_argument {
  NonpositiveTarget() : std::invalid_argument("calibration target must be nonzero") {}
};

struct DecompositionMismatch : std::runtime_error {
  double residual;
  explicit DecompositionMismatch(double residual_)
      : std::runtime_error("flux decomposition residual " + std::to_string(residual_) +
                           " exceeds tolerance"),
        residual(residual_) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace shellflux
