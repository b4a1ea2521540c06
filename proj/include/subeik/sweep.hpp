#pragma once

#include "subeik/grid.hpp"

#include <functional>
#include <vector>

namespace subeik {

struct SweepOptions {
  /// Stop when a sweep changes no node by this much or more.
  double tol = 1e-8;
  /// Budget counted in single-ordering sweeps.
  int max_sweeps = 400;
  /// Lower bound on the dissipation as a fraction of the field row norm.
  double sigma_floor = 0.5;
  /// Width of the ghost layer outside the domain, in cells.
  int ghost_cells = 3;
  HamiltonianOptions hamiltonian;
};

/// Grid approximation of the minimum time function.
struct ValueField {
  Grid grid;
  std::vector<double> values;
  /// |H(x, D_h T) - 1| on inside nodes with a full stencil, NaN elsewhere.
  std::vector<double> residual;
  int iterations = 0;
  bool converged = false;
  double last_update = 0.0;

  double value(std::size_t flat) const { return values[flat]; }
};

/// Boundary data model: time to cover signed distance d from the boundary
/// when the normal speed is H(x, nu). Near characteristic points the linear
/// model d / H is capped by sqrt(d * ell) with ell half the domain diameter.
double boundary_time_model(double distance, double normal_speed, double ell);

/// Lax-Friedrichs fast sweeping for sum_j (X_j T)^2 = 1 in Omega, T = 0 on
/// the boundary. Returns the best field with `converged == false` when the
/// sweep budget runs out; callers decide whether that is an error.
ValueField solve(const VectorFieldSystem& sys, const ImplicitDomain& dom,
                 Grid grid, const SweepOptions& opts = {});

/// Same as `solve` but throws NotConverged when the budget is exhausted.
ValueField solve_or_throw(const VectorFieldSystem& sys,
                          const ImplicitDomain& dom, Grid grid,
                          const SweepOptions& opts = {});

/// Centered-difference gradient at a node, false if the stencil leaves the
/// active nodes.
bool node_gradient(const ValueField& field, std::size_t flat, Vector& grad);

/// Fills `field.residual` and returns it.
const std::vector<double>& compute_residual(const VectorFieldSystem& sys,
                                            ValueField& field);

struct ResidualStats {
  double max = 0.0;
  double mean = 0.0;
  std::size_t count = 0;
};

/// Statistics of the residual over inside nodes, skipping nodes for which
/// `exclude` returns true.
ResidualStats residual(const ValueField& field,
                       const std::function<bool(std::size_t)>& exclude = {});

/// Multilinear interpolation of the node values. NaN outside the lattice or
/// when a cell corner is inactive.
double interpolate_value(const ValueField& field, const Vector& x);

/// Multilinear interpolation of the nodal centered gradients.
/// Returns false if any corner lacks a full stencil.
bool interpolate_gradient(const ValueField& field, const Vector& x,
                          Vector& grad);

/// Multilinear interpolation of nodal centered-difference Hessians.
bool interpolate_hessian(const ValueField& field, const Vector& x,
                         Matrix& hess);

/// Centered second-difference Hessian at a node.
bool node_hessian(const ValueField& field, std::size_t flat, Matrix& hess);

}  // namespace subeik
