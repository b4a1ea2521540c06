#pragma once

#include "subeik/domain.hpp"
#include "subeik/sweep.hpp"

#include <string_view>
#include <vector>

namespace subeik {

/// Flag thresholds of the form scale / h^power.
struct SingularThresholds {
  /// Lipschitz blow-up cut on the local difference quotient.
  double lip_scale = 10.0;
  double lip_power = 0.5;
  /// Upper cut on the largest eigenvalue of the discrete Hessian.
  double hess_scale = 0.25;
  double hess_power = 1.0;
  /// Cap on the quadratic constant of the proximal lower bound.
  double prox_scale = 0.25;
  double prox_power = 1.0;
  /// Radius, in cells, of the proximal test neighbourhood.
  int rho_cells = 3;
  /// Cut on centered third differences, scale / h^2.
  double third_scale = 0.15;

  double lip_cut(double h) const;
  double hess_cut(double h) const;
  double prox_cap(double h) const;
  double third_cut(double h) const;
};

struct ProximalTestResult {
  std::size_t node = 0;
  bool has_proximal = false;
  /// Smallest c making the quadratic lower bound hold, capped at the cap.
  double c = 0.0;
  double rho = 0.0;
};

/// Tests T(y) - T(x) - <p, y - x> >= -c |y - x|^2 for grid nodes y with
/// |y - x| <= rho_cells * h, p the centered gradient at x. Throws
/// StencilClipped when the neighbourhood leaves Omega.
ProximalTestResult proximal_test(const ValueField& field, std::size_t node,
                                 int rho_cells, double c_max);

struct SemiconcavityTestResult {
  std::size_t node = 0;
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  double lip_quotient = 0.0;
  /// lambda_max above the Hessian cut.
  bool c11_violation = false;
  bool proximal_tested = false;
  bool has_proximal = true;
  bool lip_flag = false;
  /// Union of every C^{1,1} failure, Lipschitz failures included.
  bool c11_flag = false;
};

/// Per inside node with a full second-difference stencil.
std::vector<SemiconcavityTestResult> semiconcavity_scan(
    const ValueField& field, const SingularThresholds& params = {});

enum class PointClass { SmoothCandidate, C11Singular, LipschitzSingular };

std::string_view to_string(PointClass c);

/// Lipschitz-singular if the difference quotient blows up; otherwise
/// C11-singular if the proximal test fails or the Hessian cut is exceeded;
/// otherwise smooth-candidate.
PointClass classify_point(const ValueField& field, std::size_t node,
                          const SingularThresholds& params = {});

/// Nodes whose largest centered third difference along the axes and face
/// diagonals exceeds the third-difference cut: a direct smoothness proxy.
std::vector<std::size_t> third_difference_flags(
    const ValueField& field, const SingularThresholds& params = {});

/// Nodes within one cell (in the max norm) of any node of `nodes`.
std::vector<std::size_t> dilate(const Grid& grid,
                                const std::vector<std::size_t>& nodes);

// Singular trajectory certificates.

struct CertificateTolerances {
  double ode = 1e-6;
  double onchar = 1e-8;
  double angle = 1e-6;
};

struct SingularityCertificate {
  std::vector<double> times;
  std::vector<Vector> y;
  std::vector<Vector> p;
  /// max |p' - sum_j u_j (dX_j/dx)^T p| over the mesh.
  double residual_costate = 0.0;
  /// max_{k,t} |<X_k(y(t)), p(t)>|.
  double residual_onchar = 0.0;
  /// max |y' - sum_j u_j X_j(y)|; informational.
  double residual_dynamics = 0.0;
  double lambda = 0.0;
  double angle_defect = 0.0;
  /// min_t |p(t)|.
  double nonvanishing = 0.0;
  bool valid = false;
};

/// Checks the costate equation, annihilation of all fields and positive
/// transversality at the boundary endpoint. Derivatives of the samples are
/// taken on the common mesh by forward differences compared with the
/// averaged right-hand sides (second order). Throws MeshMismatch or
/// EndpointOffBoundary.
SingularityCertificate certify_singular_trajectory(
    const VectorFieldSystem& sys, const ImplicitDomain& dom,
    const std::vector<double>& times, const std::vector<Vector>& y,
    const std::vector<Vector>& p, const std::vector<Vector>& u,
    const CertificateTolerances& tols = {});

// Reports and refinement studies.

struct SingularityReport {
  double h = 0.0;
  int dim = 0;
  SingularThresholds thresholds;
  std::vector<std::size_t> flagged_lip;
  std::vector<std::size_t> flagged_c11;
  double measure_lip = 0.0;
  double measure_c11 = 0.0;
  std::vector<SingularityCertificate> certificates;
  bool converged = true;
  int iterations = 0;
};

/// Flags from a scan; measures are h^n times the number of flagged inside
/// nodes.
SingularityReport make_report(const ValueField& field,
                              const std::vector<SemiconcavityTestResult>& scan,
                              const SingularThresholds& params);

struct StudyRow {
  double h = 0.0;
  double measure_c11 = 0.0;
  double measure_lip = 0.0;
  /// Least-squares slope of log measure_c11 against log h over the rows so
  /// far; NaN until two positive measures are available.
  double decay_exponent = 0.0;
  SingularityReport report;
};

/// Least-squares slope of log(y) against log(x) over pairs with y > 0.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Solve plus scan per spacing. `h_list` must be strictly decreasing with at
/// least three entries. Grids run concurrently. Throws NotConverged naming
/// the spacing whose sweep budget ran out.
std::vector<StudyRow> refinement_study(const VectorFieldSystem& sys,
                                       const ImplicitDomain& dom,
                                       const std::vector<double>& h_list,
                                       const SweepOptions& sweep = {},
                                       const SingularThresholds& params = {});

// Brute-force minimum-time oracle.

struct OracleOptions {
  /// Number of control directions on the unit sphere of R^N (the origin is
  /// always added).
  int controls = 32;
  /// Time step of the discrete dynamics; zero selects the grid spacing.
  double step = 0.0;
  double tol = 1e-8;
  int max_iterations = 2000;
};

/// Controls on the unit sphere of R^N: equispaced for N = 2, a Fibonacci
/// lattice for N = 3, deterministic normalized lattice points otherwise,
/// plus the origin.
std::vector<Vector> control_mesh(int count_fields, int directions);

/// Value iteration T(x) = min_u { delta + T(x + delta sum_j u_j X_j(x)) }
/// with multilinear interpolation; a step that leaves Omega costs the
/// linearly interpolated crossing time. Inside nodes start at a large value,
/// so the iterates decrease monotonically. Throws NotConverged when the
/// iteration budget runs out.
ValueField dp_oracle(const VectorFieldSystem& sys, const ImplicitDomain& dom,
                     Grid grid, const OracleOptions& opts = {});

}  // namespace subeik
