#pragma once

#include <stdexcept>
#include <string>

namespace ergolab {

/// Caller passed arguments that violate an operation's preconditions
/// (phase-space mismatch, grid mismatch, out-of-range index, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value object was constructed with parameters that break its invariants
/// (|b| >= 1, |det L| != 1, probabilities not summing to one, ...).
class InvariantViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method failed to reach its target accuracy.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A search ran out of its combinatorial budget without an answer.  This is
/// an inconclusive outcome, never a disproof.
class BudgetExhausted : public std::runtime_error {
 public:
  explicit BudgetExhausted(const std::string& what, double progress = 0.0)
      : std::runtime_error(what), progress_(progress) {}
  /// Fraction of the goal reached when the budget ran out (e.g. coverage).
  double progress() const noexcept { return progress_; }

 private:
  double progress_;
};

}  // namespace ergolab
