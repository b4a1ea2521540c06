#include "subeik/fields.hpp"

#include "subeik/error.hpp"
#include "subeik/polynomial.hpp"

#include <cmath>
#include <limits>

namespace subeik {

double fd_step_first(const Vector& x) {
  static const double base =
      std::cbrt(std::numeric_limits<double>::epsilon());
  return base * (1.0 + x.norm());
}

double fd_step_second(const Vector& x) {
  static const double base =
      std::pow(std::numeric_limits<double>::epsilon(), 0.25);
  return base * (1.0 + x.norm());
}

Matrix eval_fields(const VectorFieldSystem& sys, const Vector& x) {
  return sys.eval(x);
}

std::vector<FieldHessian> field_hessians(const VectorFieldSystem& sys,
                                         const Vector& x) {
  if (sys.has_hessian()) return sys.hess(x);
  const int n = sys.dim;
  const double step = fd_step_first(x);
  std::vector<FieldHessian> out(sys.count,
                                FieldHessian(n, Matrix::Zero(n, n)));
  for (int m = 0; m < n; ++m) {
    Vector xp = x, xm = x;
    xp[m] += step;
    xm[m] -= step;
    const auto jp = sys.jac(xp);
    const auto jm = sys.jac(xm);
    for (int j = 0; j < sys.count; ++j) {
      const Matrix d = (jp[j] - jm[j]) / (2.0 * step);
      for (int k = 0; k < n; ++k) out[j][k].col(m) = d.row(k).transpose();
    }
  }
  // Symmetrize in (l, m).
  for (auto& fh : out) {
    for (auto& h : fh) h = 0.5 * (h + h.transpose()).eval();
  }
  return out;
}

namespace {

PolynomialTerm term(int field, int component, std::vector<int> exps,
                    double coeff) {
  return PolynomialTerm{field, component, std::move(exps), coeff};
}

}  // namespace

VectorFieldSystem euclidean(int n) {
  std::vector<PolynomialTerm> terms;
  for (int j = 0; j < n; ++j) {
    terms.push_back(term(j, j, std::vector<int>(n, 0), 1.0));
  }
  return polynomial_system("euclidean", n, n, std::move(terms));
}

VectorFieldSystem heisenberg() {
  return polynomial_system("heisenberg", 3, 2,
                           {term(0, 0, {0, 0, 0}, 1.0),
                            term(0, 2, {0, 1, 0}, -0.5),
                            term(1, 1, {0, 0, 0}, 1.0),
                            term(1, 2, {1, 0, 0}, 0.5)});
}

VectorFieldSystem grushin() {
  return polynomial_system(
      "grushin", 2, 2, {term(0, 0, {0, 0}, 1.0), term(1, 1, {1, 0}, 1.0)});
}

VectorFieldSystem martinet() {
  return polynomial_system("martinet", 3, 2,
                           {term(0, 0, {0, 0, 0}, 1.0),
                            term(1, 1, {0, 0, 0}, 1.0),
                            term(1, 2, {2, 0, 0}, 0.5)});
}

VectorFieldSystem builtin_system(const std::string& name, int dim) {
  if (name == "euclidean") {
    if (dim <= 0) throw ConfigError("euclidean system needs system.dim > 0");
    return euclidean(dim);
  }
  if (name == "heisenberg") return heisenberg();
  if (name == "grushin") return grushin();
  if (name == "martinet") return martinet();
  throw ConfigError("unknown system kind '" + name + "'");
}

double hamiltonian(const VectorFieldSystem& sys, const Vector& x,
                   const Vector& p) {
  return hamiltonian(sys.eval(x), p);
}

bool is_degenerate(const Matrix& fields, const Vector& p, double h,
                   const HamiltonianOptions& opts) {
  const double scale = p.norm() * fields.norm();
  return !(scale > 0.0) || h <= opts.h_min * scale;
}

HamiltonianGradients hamiltonian_gradients(const VectorFieldSystem& sys,
                                           const Vector& x, const Vector& p,
                                           const HamiltonianOptions& opts) {
  const Matrix a = sys.eval(x);
  const Vector pairing = a.transpose() * p;  // <p, X_j>
  const double h = pairing.norm();
  if (is_degenerate(a, p, h, opts)) {
    throw DegenerateCovector("H(x,p) vanishes; all fields annihilate p");
  }
  const auto jac = sys.jac(x);
  HamiltonianGradients g;
  g.value = h;
  g.grad_p = a * pairing / h;
  g.grad_x = Vector::Zero(sys.dim);
  for (int j = 0; j < sys.count; ++j) {
    g.grad_x += pairing[j] * (jac[j].transpose() * p);
  }
  g.grad_x /= h;
  return g;
}

HamiltonianHessians hamiltonian_hessians(const VectorFieldSystem& sys,
                                         const Vector& x, const Vector& p,
                                         const HamiltonianOptions& opts) {
  const int n = sys.dim;
  const Matrix a = sys.eval(x);
  const Vector pairing = a.transpose() * p;
  const double h = pairing.norm();
  if (is_degenerate(a, p, h, opts)) {
    throw DegenerateCovector("H(x,p) vanishes; all fields annihilate p");
  }
  const auto jac = sys.jac(x);
  const auto hess = field_hessians(sys, x);

  // Work with G = H^2 / 2, whose derivatives are polynomial in p.
  Vector gp = a * pairing;
  Vector gx = Vector::Zero(n);
  Matrix gpp = a * a.transpose();
  Matrix gpx = Matrix::Zero(n, n);
  Matrix gxx = Matrix::Zero(n, n);
  for (int j = 0; j < sys.count; ++j) {
    const Vector jtp = jac[j].transpose() * p;  // d<p,X_j>/dx
    gx += pairing[j] * jtp;
    gpx += a.col(j) * jtp.transpose() + pairing[j] * jac[j];
    gxx += jtp * jtp.transpose();
    for (int k = 0; k < n; ++k) gxx += pairing[j] * p[k] * hess[j][k];
  }
  const Vector hp = gp / h;
  const Vector hx = gx / h;
  HamiltonianHessians out;
  out.pp = (gpp - hp * hp.transpose()) / h;
  out.px = (gpx - hp * hx.transpose()) / h;
  out.xx = (gxx - hx * hx.transpose()) / h;
  return out;
}

Vector lie_bracket(const Vector& a, const Matrix& jac_a, const Vector& b,
                   const Matrix& jac_b) {
  return jac_b * a - jac_a * b;
}

namespace {

struct BracketField {
  std::function<Vector(const Vector&)> value;
  std::function<Matrix(const Vector&)> jac;
};

Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f,
                   const Vector& x) {
  const double step = fd_step_first(x);
  const Vector f0 = f(x);
  Matrix j(f0.size(), x.size());
  for (Eigen::Index l = 0; l < x.size(); ++l) {
    Vector xp = x, xm = x;
    xp[l] += step;
    xm[l] -= step;
    j.col(l) = (f(xp) - f(xm)) / (2.0 * step);
  }
  return j;
}

// sum_m h[k](l, m) v_m as an n x n matrix indexed (k, l).
Matrix contract(const FieldHessian& h, const Vector& v) {
  const auto n = static_cast<Eigen::Index>(h.size());
  Matrix out(n, n);
  for (Eigen::Index k = 0; k < n; ++k) out.row(k) = (h[k] * v).transpose();
  return out;
}

int numerical_rank(const Matrix& span, double rank_tol) {
  if (span.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(span);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || !(s[0] > 0.0)) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > rank_tol * s[0]) ++rank;
  }
  return rank;
}

}  // namespace

HormanderResult hormander_check(const VectorFieldSystem& sys, const Vector& x,
                                int max_depth, double rank_tol) {
  const int n = sys.dim;
  std::vector<BracketField> generators;
  for (int j = 0; j < sys.count; ++j) {
    generators.push_back(
        {[&sys, j](const Vector& y) -> Vector { return sys.eval(y).col(j); },
         [&sys, j](const Vector& y) -> Matrix { return sys.jac(y)[j]; }});
  }

  std::vector<Vector> values;
  std::vector<BracketField> layer = generators;
  for (int depth = 1; depth <= max_depth; ++depth) {
    if (depth == 2) {
      // Length-two brackets of generators have closed-form Jacobians when
      // the system carries second derivatives, which makes length-three
      // brackets exact as well.
      layer.clear();
      for (int i = 0; i < sys.count; ++i) {
        for (int j = i + 1; j < sys.count; ++j) {
          BracketField f;
          f.value = [&sys, i, j](const Vector& y) -> Vector {
            const Matrix a = sys.eval(y);
            const auto jac = sys.jac(y);
            return lie_bracket(a.col(i), jac[i], a.col(j), jac[j]);
          };
          if (sys.has_hessian()) {
            f.jac = [&sys, i, j](const Vector& y) -> Matrix {
              const Matrix a = sys.eval(y);
              const auto jac = sys.jac(y);
              const auto hess = sys.hess(y);
              return contract(hess[j], a.col(i)) + jac[j] * jac[i] -
                     contract(hess[i], a.col(j)) - jac[i] * jac[j];
            };
          } else {
            auto value = f.value;
            f.jac = [value](const Vector& y) { return fd_jacobian(value, y); };
          }
          layer.push_back(std::move(f));
        }
      }
    } else if (depth > 2) {
      std::vector<BracketField> next;
      for (const auto& g : generators) {
        for (const auto& f : layer) {
          BracketField b;
          b.value = [g, f](const Vector& y) -> Vector {
            return lie_bracket(g.value(y), g.jac(y), f.value(y), f.jac(y));
          };
          auto value = b.value;
          b.jac = [value](const Vector& y) { return fd_jacobian(value, y); };
          next.push_back(std::move(b));
        }
      }
      layer = std::move(next);
    }
    for (const auto& f : layer) values.push_back(f.value(x));

    Matrix span(n, static_cast<Eigen::Index>(values.size()));
    for (std::size_t c = 0; c < values.size(); ++c) {
      span.col(static_cast<Eigen::Index>(c)) = values[c];
    }
    const int rank = numerical_rank(span, rank_tol);
    if (rank == n) return {true, depth, rank};
    if (depth == max_depth) {
      throw DepthExceeded("brackets up to length " + std::to_string(depth) +
                          " reach rank " + std::to_string(rank) + " < " +
                          std::to_string(n));
    }
  }
  throw DepthExceeded("max_depth must be positive");
}

}  // namespace subeik
