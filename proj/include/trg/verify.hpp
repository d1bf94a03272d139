#pragma once

// Self-verification suite: property checks for every module plus the
// acceptance checks, each reporting pass/fail, a short detail line and its
// wall time.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace trg {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Check {
  std::string id;        ///< short key, e.g. "C1" or "A4"
  std::string module;
  std::string property;  ///< one-line statement of what is checked
  double time_limit = 0.0;  ///< seconds; 0 means unlimited
  std::function<Outcome()> run;
};

struct CheckResult {
  std::string id;
  std::string module;
  std::string property;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Property checks, one or more per module invariant.
std::vector<Check> invariant_checks();
/// Acceptance checks A1..A7 with their runtime budgets.
std::vector<Check> acceptance_checks();

/// Runs one check; exceptions and exceeded time limits count as failures.
CheckResult run_check(const Check& check);
/// Runs everything, printing one line per check and a traceability table.
std::vector<CheckResult> run_verification(std::ostream& out);

}  // namespace trg
