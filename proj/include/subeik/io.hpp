#pragma once

#include "subeik/flow.hpp"
#include "subeik/singular.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace subeik {

/// 17 significant digits: doubles survive a text round trip exactly.
std::string format_double(double x);

/// Header plus string cells; no quoting (no emitted cell contains a comma).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// Column index by name, -1 if absent.
  int column(const std::string& name) const;
};

/// Throws ConfigError when a row width differs from the header.
CsvTable read_csv(std::istream& in);
double parse_double(const std::string& cell);

/// x1..xn, value, residual, mask; one row per lattice node.
void write_field_csv(std::ostream& out, const ValueField& field);

/// t, X1..Xn, P1..Pn, detM, H. A nonnegative `seed` prepends a seed column.
void write_trajectory_csv(std::ostream& out,
                          const CharacteristicTrajectory& traj, int seed = -1);
void write_trajectory_header(std::ostream& out, int dim, bool with_seed);

/// One row per seed: seed, z1..zn, status, has_conjugate, t0, t_lo, t_hi.
/// Failed launches carry the error name in `status`.
struct ConjugateRow {
  Vector z;
  std::string status = "ok";
  ConjugateReport report;
};
void write_conjugate_csv(std::ostream& out, const std::vector<ConjugateRow>& rows);

/// Structured `key = value` text in sections.
void write_report(std::ostream& out, const SingularityReport& report);

/// x1..xn, class, lambda_max, Lip_quotient for every C11-flagged node.
void write_flagged_csv(std::ostream& out, const ValueField& field,
                       const std::vector<SemiconcavityTestResult>& scan);

/// h, measure_C11, measure_Lip, decay_exponent_so_far.
void write_study_csv(std::ostream& out, const std::vector<StudyRow>& rows);

}  // namespace subeik
