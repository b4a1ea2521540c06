#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace subeik {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Second derivatives of one field: entry [k](l, m) = d^2 X^k / dx_l dx_m.
using FieldHessian = std::vector<Matrix>;

/// A finite family X_1..X_N of smooth vector fields on an open subset of R^n.
///
/// `eval(x)` returns the n x N matrix whose column j is X_j(x). `jac(x)[j]`
/// is the n x n Jacobian with entry (k, l) = dX_j^k/dx_l. `hess` is optional;
/// when empty, second derivatives are taken by central differences of `jac`.
/// The fields need not be linearly independent and N < n is not required.
struct VectorFieldSystem {
  std::string name;
  int dim = 0;
  int count = 0;
  std::function<Matrix(const Vector&)> eval;
  std::function<std::vector<Matrix>(const Vector&)> jac;
  std::function<std::vector<FieldHessian>(const Vector&)> hess;

  bool has_hessian() const { return static_cast<bool>(hess); }
};

/// Columns X_1(x)..X_N(x) in order.
Matrix eval_fields(const VectorFieldSystem& sys, const Vector& x);

/// Exact second derivatives when the system registers them, central
/// differences of the Jacobians otherwise.
std::vector<FieldHessian> field_hessians(const VectorFieldSystem& sys,
                                         const Vector& x);

// Built-in systems. All are polynomial and carry exact derivatives.
VectorFieldSystem euclidean(int n);
/// X1 = dx - (y/2) dz, X2 = dy + (x/2) dz on R^3.
VectorFieldSystem heisenberg();
/// X1 = dx, X2 = x dy on R^2.
VectorFieldSystem grushin();
/// X1 = dx, X2 = dy + (x^2/2) dz on R^3.
VectorFieldSystem martinet();

VectorFieldSystem builtin_system(const std::string& name, int dim);

// Hamiltonian H(x, p) = (sum_j <p, X_j(x)>^2)^{1/2}.

struct HamiltonianOptions {
  /// Scale-relative degeneracy threshold: H <= h_min * |p| * |A(x)|_F is
  /// treated as H = 0.
  double h_min = 1e-8;
};

double hamiltonian(const VectorFieldSystem& sys, const Vector& x,
                   const Vector& p);

/// Same as `hamiltonian` for a precomputed field matrix A = eval(x).
inline double hamiltonian(const Matrix& fields, const Vector& p) {
  return (fields.transpose() * p).norm();
}

struct HamiltonianGradients {
  double value = 0.0;
  Vector grad_x;
  Vector grad_p;
};

/// Throws DegenerateCovector when H(x, p) is below the degeneracy threshold.
HamiltonianGradients hamiltonian_gradients(const VectorFieldSystem& sys,
                                           const Vector& x, const Vector& p,
                                           const HamiltonianOptions& opts = {});

/// Second derivatives of H. `px(k, l)` = d^2 H / dp_k dx_l, so the
/// linearized characteristic flow reads dX' = -(px dX + pp dP),
/// dP' = xx dX + px^T dP.
struct HamiltonianHessians {
  Matrix pp;
  Matrix px;
  Matrix xx;
};

HamiltonianHessians hamiltonian_hessians(const VectorFieldSystem& sys,
                                         const Vector& x, const Vector& p,
                                         const HamiltonianOptions& opts = {});

bool is_degenerate(const Matrix& fields, const Vector& p, double h,
                   const HamiltonianOptions& opts = {});

// Bracket-generating condition.

struct HormanderResult {
  bool satisfied = false;
  /// Smallest bracket length whose span is R^n.
  int depth = 0;
  /// Numerical rank reached at `depth`.
  int rank = 0;
};

/// Lie bracket [A, B] = (dB) A - (dA) B.
Vector lie_bracket(const Vector& a, const Matrix& jac_a, const Vector& b,
                   const Matrix& jac_b);

/// Rank test of iterated brackets of the fields at x, with rank cut
/// rank_tol * (largest singular value). Throws DepthExceeded when the span
/// is still deficient at max_depth; that outcome is inconclusive, not a
/// disproof.
HormanderResult hormander_check(const VectorFieldSystem& sys, const Vector& x,
                                int max_depth, double rank_tol = 1e-7);

/// Central-difference step for first derivatives at x.
double fd_step_first(const Vector& x);
/// Step for second derivatives taken from function values.
double fd_step_second(const Vector& x);

}  // namespace subeik
