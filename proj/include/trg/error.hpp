#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace trg {

/// Bad user input: malformed measures, inconsistent dimensions, bad config.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A measure charges a cell where the reference measure vanishes.
class NotAbsolutelyContinuous : public std::domain_error {
 public:
  NotAbsolutelyContinuous()
      : std::domain_error("not absolutely continuous: pi charges a cell where m = 0") {}
};

/// Exact enumeration would exceed the configured work budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(double required, double budget)
      : std::runtime_error("enumeration budget exceeded: needs ~" + std::to_string(required) +
                           " configurations, budget is " + std::to_string(budget)),
        required_(required),
        budget_(budget) {}
  double required() const { return required_; }
  double budget() const { return budget_; }

 private:
  double required_;
  double budget_;
};

}  // namespace trg
