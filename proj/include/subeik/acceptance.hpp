#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace subeik {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  /// Measured quantities against their bounds. Contains no timings, so the
  /// text is reproducible.
  std::string detail;
  /// Serialized outputs produced while checking, compared across runs.
  std::string artifact;
};

/// Runs criteria 1 through 11. The determinism check (11) repeats 1 through
/// 10 and compares details and artifacts byte for byte.
std::vector<CriterionResult> run_acceptance();

/// `PASS 3 conjugate time, circle: ...`, one line per criterion.
void print_results(std::ostream& out, const std::vector<CriterionResult>& results);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace subeik
