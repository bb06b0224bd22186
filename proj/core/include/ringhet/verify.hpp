// The acceptance suite: nine self-contained checks that exercise the library
// end to end, from exact combinatorial counts through closed-form spectra to
// long simulations, with tolerances pinned in code.  Each criterion returns
// a pass/fail verdict plus a one-line account of what was measured, so both
// the test harness and the CLI's `verify` command can print one line per
// criterion and exit nonzero on any failure.
//
// Where a criterion has two independent routes to the same answer (spectral
// verdict vs. brute-force iteration, closed form vs. numeric roots), both are
// computed here and compared; the suite never trusts a single code path for
// a number it can cross-check.

#pragma once

#include <string>
#include <vector>

namespace ringhet {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;   // what was measured, or the first few failures
  double seconds = 0.0;
};

// Runs one criterion by number (1..9; std::out_of_range otherwise).
CriterionResult run_criterion(int id);

// Runs the given criteria in order; an empty list means all nine.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids = {});

}  // namespace ringhet
