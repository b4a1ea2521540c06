#pragma once

#include "subeik/domain.hpp"
#include "subeik/sweep.hpp"

#include <optional>
#include <string>
#include <vector>

namespace subeik {

struct FlowOptions {
  /// RK4 step; zero selects 1e-3 times the domain diameter.
  double step = 0.0;
  double t_max = 1.0;
  bool stop_on_exit = true;
  /// Launch points with H(z, nu) <= char_tol are characteristic.
  double char_tol = 1e-6;
  HamiltonianOptions hamiltonian;
};

/// Position, costate and their (t, xi) Jacobians at one time.
struct CharacteristicState {
  Vector x;
  Vector p;
  /// Column 0: dX/dt; columns 1..n-1: dX/dxi along the chart basis.
  Matrix m;
  Matrix pjac;
};

/// Samples of one backward characteristic, parametrized so that
/// T(X(t, xi)) = t.
struct CharacteristicTrajectory {
  BoundaryPoint xi;
  std::vector<double> times;
  std::vector<CharacteristicState> states;
  std::vector<double> det_m;
  std::vector<double> ham;
  double h_drift = 0.0;
  /// End of integration: t_max, or the interpolated exit time.
  double t_end = 0.0;
  bool exited = false;
  double step = 0.0;

  std::size_t size() const { return times.size(); }
};

/// Initial state: X = z, P = nu / H(z, nu), tangent columns of M equal to
/// the chart basis, tangent columns of P_jac from the shape operator.
CharacteristicState initial_state(const VectorFieldSystem& sys,
                                  const ImplicitDomain& dom,
                                  const BoundaryPoint& xi,
                                  const HamiltonianOptions& opts = {});

/// Right-hand side of the characteristic system and its linearization.
CharacteristicState flow_rhs(const VectorFieldSystem& sys,
                             const CharacteristicState& s,
                             const HamiltonianOptions& opts = {});

/// One classical RK4 step of size dt.
CharacteristicState rk4_step(const VectorFieldSystem& sys,
                             const CharacteristicState& s, double dt,
                             const HamiltonianOptions& opts = {});

/// Integrates -X' = grad_p H, P' = grad_x H with the variational system.
/// Throws CharacteristicLaunch at characteristic points.
CharacteristicTrajectory launch(const VectorFieldSystem& sys,
                                const ImplicitDomain& dom,
                                const BoundaryPoint& xi,
                                const FlowOptions& opts = {});

struct ConjugateReport {
  bool has_conjugate = false;
  double t0 = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double det_lo = 0.0;
  double det_hi = 0.0;
};

/// First zero of det M along the trajectory, refined by bisection with
/// re-integration from the stored states until t_hi - t_lo <= root_tol.
ConjugateReport conjugate_time(const VectorFieldSystem& sys,
                               const CharacteristicTrajectory& traj,
                               double root_tol = 1e-9,
                               const HamiltonianOptions& opts = {});

struct LaunchResult {
  std::optional<CharacteristicTrajectory> trajectory;
  std::string error_kind;
  std::string error_message;

  bool ok() const { return trajectory.has_value(); }
};

/// Independent launches, possibly concurrent. Output order matches input;
/// per-seed failures are recorded, not thrown.
std::vector<LaunchResult> wavefront(const VectorFieldSystem& sys,
                                    const ImplicitDomain& dom,
                                    const std::vector<BoundaryPoint>& seeds,
                                    const FlowOptions& opts = {});

/// max over samples with t in [t_lo, t_hi] of |-P(t) - D_h T(X(t))|, with
/// the grid gradient interpolated from centered differences. Samples whose
/// stencil leaves the active nodes are skipped; `checked` counts the rest.
struct DualityDefect {
  double max_defect = 0.0;
  std::size_t checked = 0;
};

DualityDefect gradient_costate_defect(const CharacteristicTrajectory& traj,
                                      const ValueField& field, double t_lo,
                                      double t_hi);

/// max over samples of |hess(X) M + P_jac| (Frobenius), for a known
/// Hessian of T.
double second_order_defect(
    const CharacteristicTrajectory& traj, double t_lo, double t_hi,
    const std::function<Matrix(const Vector&)>& hessian_of_value);

/// Extreme eigenvalues of the interpolated discrete Hessian of T along the
/// trajectory. `lower_constant` is the smallest C with
/// lambda_min >= -C over the checked samples.
struct HessianProfile {
  std::vector<double> times;
  std::vector<double> lambda_min;
  std::vector<double> lambda_max;
  double lower_constant = 0.0;
};

HessianProfile hessian_profile(const CharacteristicTrajectory& traj,
                               const ValueField& field, double t_lo,
                               double t_hi);

}  // namespace subeik
