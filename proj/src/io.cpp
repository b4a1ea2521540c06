#include "subeik/io.hpp"

#include "subeik/error.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace subeik {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& cell) {
  char* end = nullptr;
  const double x = std::strtod(cell.c_str(), &end);
  if (cell.empty() || *end != '\0') {
    throw ConfigError("not a number: '" + cell + "'");
  }
  return x;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void coordinate_header(std::ostream& out, const char* prefix, int n) {
  for (int a = 1; a <= n; ++a) out << prefix << a << ',';
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV");
  t.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto row = split(line);
    if (row.size() != t.header.size()) {
      throw ConfigError("CSV line " + std::to_string(lineno) + " has " +
                        std::to_string(row.size()) + " cells, header has " +
                        std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_field_csv(std::ostream& out, const ValueField& field) {
  const Grid& grid = field.grid;
  coordinate_header(out, "x", grid.dim());
  out << "value,residual,mask\n";
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const Vector x = grid.point(f);
    for (int a = 0; a < grid.dim(); ++a) out << format_double(x[a]) << ',';
    const double r = f < field.residual.size()
                         ? field.residual[f]
                         : std::numeric_limits<double>::quiet_NaN();
    out << format_double(field.values[f]) << ',' << format_double(r) << ','
        << to_string(grid.kind(f)) << '\n';
  }
}

void write_trajectory_header(std::ostream& out, int dim, bool with_seed) {
  if (with_seed) out << "seed,";
  out << "t,";
  coordinate_header(out, "X", dim);
  coordinate_header(out, "P", dim);
  out << "detM,H\n";
}

void write_trajectory_csv(std::ostream& out,
                          const CharacteristicTrajectory& traj, int seed) {
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj.states[i];
    if (seed >= 0) out << seed << ',';
    out << format_double(traj.times[i]) << ',';
    for (Eigen::Index a = 0; a < s.x.size(); ++a) out << format_double(s.x[a]) << ',';
    for (Eigen::Index a = 0; a < s.p.size(); ++a) out << format_double(s.p[a]) << ',';
    out << format_double(traj.det_m[i]) << ',' << format_double(traj.ham[i]) << '\n';
  }
}

void write_conjugate_csv(std::ostream& out, const std::vector<ConjugateRow>& rows) {
  const int n = rows.empty() ? 0 : static_cast<int>(rows.front().z.size());
  out << "seed,";
  coordinate_header(out, "z", n);
  out << "status,has_conjugate,t0,t_lo,t_hi\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << i << ',';
    for (Eigen::Index a = 0; a < r.z.size(); ++a) out << format_double(r.z[a]) << ',';
    out << r.status << ',' << (r.report.has_conjugate ? 1 : 0) << ','
        << format_double(r.report.t0) << ',' << format_double(r.report.t_lo)
        << ',' << format_double(r.report.t_hi) << '\n';
  }
}

void write_report(std::ostream& out, const SingularityReport& rep) {
  const auto& th = rep.thresholds;
  out << "[grid]\n"
      << "h = " << format_double(rep.h) << '\n'
      << "dim = " << rep.dim << '\n'
      << "converged = " << (rep.converged ? "true" : "false") << '\n'
      << "iterations = " << rep.iterations << '\n';
  out << "\n[thresholds]\n"
      << "lip_cut = " << format_double(th.lip_cut(rep.h)) << '\n'
      << "hess_cut = " << format_double(th.hess_cut(rep.h)) << '\n'
      << "prox_cap = " << format_double(th.prox_cap(rep.h)) << '\n'
      << "rho_cells = " << th.rho_cells << '\n';
  out << "\n[measures]\n"
      << "flagged_lip = " << rep.flagged_lip.size() << '\n'
      << "flagged_c11 = " << rep.flagged_c11.size() << '\n'
      << "measure_lip = " << format_double(rep.measure_lip) << '\n'
      << "measure_c11 = " << format_double(rep.measure_c11) << '\n';
  for (std::size_t i = 0; i < rep.certificates.size(); ++i) {
    const auto& c = rep.certificates[i];
    out << "\n[certificate " << i << "]\n"
        << "valid = " << (c.valid ? "true" : "false") << '\n'
        << "residual_costate = " << format_double(c.residual_costate) << '\n'
        << "residual_onchar = " << format_double(c.residual_onchar) << '\n'
        << "residual_dynamics = " << format_double(c.residual_dynamics) << '\n'
        << "lambda = " << format_double(c.lambda) << '\n'
        << "angle_defect = " << format_double(c.angle_defect) << '\n'
        << "nonvanishing = " << format_double(c.nonvanishing) << '\n';
  }
}

void write_flagged_csv(std::ostream& out, const ValueField& field,
                       const std::vector<SemiconcavityTestResult>& scan) {
  const Grid& grid = field.grid;
  coordinate_header(out, "x", grid.dim());
  out << "class,lambda_max,Lip_quotient\n";
  for (const auto& r : scan) {
    if (!r.c11_flag || !grid.inside(r.node)) continue;
    const Vector x = grid.point(r.node);
    for (int a = 0; a < grid.dim(); ++a) out << format_double(x[a]) << ',';
    const PointClass cls =
        r.lip_flag ? PointClass::LipschitzSingular : PointClass::C11Singular;
    out << to_string(cls) << ',' << format_double(r.lambda_max) << ','
        << format_double(r.lip_quotient) << '\n';
  }
}

void write_study_csv(std::ostream& out, const std::vector<StudyRow>& rows) {
  out << "h,measure_C11,measure_Lip,decay_exponent_so_far\n";
  for (const auto& r : rows) {
    out << format_double(r.h) << ',' << format_double(r.measure_c11) << ','
        << format_double(r.measure_lip) << ',' << format_double(r.decay_exponent)
        << '\n';
  }
}

}  // namespace subeik
