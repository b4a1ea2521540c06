#include "subeik/domain.hpp"

#include "subeik/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace subeik {

double ImplicitDomain::signed_distance(const Vector& x) const {
  const double g = grad_phi(x).norm();
  const double v = phi(x);
  if (!(g > 0.0)) return v;
  return v / g;
}

Matrix ImplicitDomain::hessian(const Vector& x) const {
  if (hess_phi) return hess_phi(x);
  const double step = fd_step_first(x);
  Matrix h(dim, dim);
  for (int l = 0; l < dim; ++l) {
    Vector xp = x, xm = x;
    xp[l] += step;
    xm[l] -= step;
    h.col(l) = (grad_phi(xp) - grad_phi(xm)) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

Vector outward_normal(const ImplicitDomain& dom, const Vector& z) {
  const double v = dom.phi(z);
  if (std::abs(v) > dom.proj_tol()) {
    throw NotOnBoundary("|phi(z)| = " + std::to_string(std::abs(v)));
  }
  const Vector g = dom.grad_phi(z);
  const double gn = g.norm();
  if (!(gn >= dom.g_min)) {
    throw DegenerateGradient("|grad phi(z)| = " + std::to_string(gn));
  }
  return g / gn;
}

BoundaryPoint make_boundary_point(const ImplicitDomain& dom, const Vector& z) {
  BoundaryPoint bp;
  bp.z = z;
  bp.normal = outward_normal(dom, z);
  const int n = dom.dim;
  Eigen::Index pivot = 0;
  bp.normal.cwiseAbs().maxCoeff(&pivot);
  bp.chart_basis.resize(n, n - 1);
  int col = 0;
  for (int i = 0; i < n; ++i) {
    if (i == pivot) continue;
    Vector v = Vector::Unit(n, i);
    v -= v.dot(bp.normal) * bp.normal;
    for (int c = 0; c < col; ++c) {
      v -= v.dot(bp.chart_basis.col(c)) * bp.chart_basis.col(c);
    }
    bp.chart_basis.col(col++) = v.normalized();
  }
  return bp;
}

double normal_hamiltonian(const VectorFieldSystem& sys,
                          const ImplicitDomain& dom, const Vector& z) {
  return hamiltonian(sys, z, outward_normal(dom, z));
}

bool is_characteristic_point(const VectorFieldSystem& sys,
                             const ImplicitDomain& dom, const Vector& z,
                             double tol) {
  return normal_hamiltonian(sys, dom, z) <= tol;
}

Vector project_to_boundary(const ImplicitDomain& dom, const Vector& x) {
  Vector z = x;
  double v = dom.phi(z);
  const double tol = dom.proj_tol();
  for (int iter = 0; iter < 100 && std::abs(v) > tol; ++iter) {
    const Vector g = dom.grad_phi(z);
    const double g2 = g.squaredNorm();
    if (!(g2 > dom.g_min * dom.g_min)) break;
    const Vector step = v * g / g2;
    double damping = 1.0;
    Vector trial = z - step;
    double tv = dom.phi(trial);
    while (std::abs(tv) >= std::abs(v) && damping > 1e-6) {
      damping *= 0.5;
      trial = z - damping * step;
      tv = dom.phi(trial);
    }
    z = trial;
    v = tv;
  }
  return z;
}

namespace {

// Candidate boundary points from sign changes of phi along lattice edges.
std::vector<Vector> lattice_crossings(const ImplicitDomain& dom, int m) {
  const int n = dom.dim;
  const Vector pad = 0.01 * (dom.bbox.hi - dom.bbox.lo);
  const Vector lo = dom.bbox.lo - pad;
  const Vector hi = dom.bbox.hi + pad;
  const Vector step = (hi - lo) / m;

  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(m + 1);
  std::vector<double> values(total);
  std::vector<int> idx(n, 0);
  auto point = [&](const std::vector<int>& id) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = lo[i] + step[i] * id[i];
    return x;
  };
  auto advance = [&](std::vector<int>& id) {
    for (int i = 0; i < n; ++i) {
      if (++id[i] <= m) return true;
      id[i] = 0;
    }
    return false;
  };
  std::size_t flat = 0;
  do {
    values[flat++] = dom.phi(point(idx));
  } while (advance(idx));

  std::vector<Vector> out;
  std::fill(idx.begin(), idx.end(), 0);
  flat = 0;
  do {
    std::size_t stride = 1;
    for (int axis = 0; axis < n; ++axis) {
      if (idx[axis] < m) {
        const double a = values[flat];
        const double b = values[flat + stride];
        if ((a < 0.0) != (b < 0.0)) {
          const double s = a / (a - b);
          Vector x = point(idx);
          x[axis] += s * step[axis];
          out.push_back(std::move(x));
        }
      }
      stride *= static_cast<std::size_t>(m + 1);
    }
    ++flat;
  } while (advance(idx));
  return out;
}

}  // namespace

std::vector<BoundaryPoint> sample_boundary(const ImplicitDomain& dom,
                                           int target_count,
                                           std::uint64_t seed) {
  if (target_count <= 0) return {};
  if (dom.bbox.lo.size() != dom.dim || dom.bbox.hi.size() != dom.dim ||
      !((dom.bbox.hi.array() > dom.bbox.lo.array()).all())) {
    throw EmptyBoundary("invalid bounding box");
  }
  const double tol = dom.proj_tol();
  std::vector<Vector> candidates;
  int m = 8;
  const int max_m = dom.dim <= 2 ? 8192 : (dom.dim == 3 ? 256 : 32);
  while (true) {
    candidates.clear();
    for (auto& x : lattice_crossings(dom, m)) {
      Vector z = project_to_boundary(dom, x);
      if (std::abs(dom.phi(z)) <= tol && dom.grad_phi(z).norm() >= dom.g_min) {
        candidates.push_back(std::move(z));
      }
    }
    if (static_cast<int>(candidates.size()) >= 4 * target_count ||
        2 * m > max_m) {
      break;
    }
    m *= 2;
  }
  if (candidates.empty()) {
    throw EmptyBoundary("phi has no sign change in the bounding box");
  }

  // Farthest-point selection.
  std::mt19937_64 rng(seed);
  const std::size_t first = rng() % candidates.size();
  std::vector<double> dist(candidates.size(),
                           std::numeric_limits<double>::infinity());
  std::vector<BoundaryPoint> out;
  std::size_t next = first;
  const double dup = 1e-9 * dom.diameter();
  for (int k = 0; k < target_count; ++k) {
    out.push_back(make_boundary_point(dom, candidates[next]));
    double best = -1.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      dist[i] = std::min(dist[i], (candidates[i] - candidates[next]).norm());
      if (dist[i] > best) {
        best = dist[i];
        best_i = i;
      }
    }
    if (best <= dup) break;  // every distinct candidate already taken
    next = best_i;
  }
  return out;
}

ImplicitDomain ball(const Vector& center, double radius) {
  if (!(radius > 0.0)) throw ConfigError("ball radius must be positive");
  ImplicitDomain d;
  d.name = "ball";
  d.dim = static_cast<int>(center.size());
  d.phi = [center, radius](const Vector& x) {
    return (x - center).norm() - radius;
  };
  d.grad_phi = [center](const Vector& x) -> Vector {
    const Vector u = x - center;
    const double r = u.norm();
    if (!(r > 0.0)) return Vector::Zero(u.size());
    return u / r;
  };
  d.hess_phi = [center](const Vector& x) -> Matrix {
    const Vector u = x - center;
    const double r = u.norm();
    const auto n = u.size();
    if (!(r > 0.0)) return Matrix::Zero(n, n);
    const Vector e = u / r;
    return (Matrix::Identity(n, n) - e * e.transpose()) / r;
  };
  d.bbox = {center.array() - radius, center.array() + radius};
  return d;
}

ImplicitDomain ellipsoid(const Vector& center, const Vector& semi_axes) {
  if (center.size() != semi_axes.size() || !(semi_axes.array() > 0.0).all()) {
    throw ConfigError("ellipsoid needs positive semi-axes matching center");
  }
  ImplicitDomain d;
  d.name = "ellipsoid";
  d.dim = static_cast<int>(center.size());
  const Vector inv2 = semi_axes.array().square().inverse();
  d.phi = [center, inv2](const Vector& x) {
    return (x - center).array().square().matrix().dot(inv2) - 1.0;
  };
  d.grad_phi = [center, inv2](const Vector& x) -> Vector {
    return 2.0 * (x - center).cwiseProduct(inv2);
  };
  d.hess_phi = [inv2](const Vector&) -> Matrix {
    return (2.0 * inv2).asDiagonal();
  };
  d.bbox = {center - semi_axes, center + semi_axes};
  return d;
}

ImplicitDomain slab(const Vector& direction, double a, double b,
                    double half_extent) {
  if (!(b > a) || !(half_extent > 0.0) || !(direction.norm() > 0.0)) {
    throw ConfigError("slab needs a < b, positive extent, nonzero direction");
  }
  const Vector e = direction.normalized();
  ImplicitDomain d;
  d.name = "slab";
  d.dim = static_cast<int>(e.size());
  d.phi = [e, a, b](const Vector& x) {
    const double s = e.dot(x);
    return (s - a) * (s - b) / (b - a);
  };
  d.grad_phi = [e, a, b](const Vector& x) -> Vector {
    return (2.0 * e.dot(x) - a - b) / (b - a) * e;
  };
  d.hess_phi = [e, a, b](const Vector&) -> Matrix {
    return 2.0 / (b - a) * e * e.transpose();
  };
  const int n = d.dim;
  Eigen::Index axis = 0;
  const bool aligned = (e.cwiseAbs().maxCoeff(&axis) == 1.0);
  if (aligned) {
    d.bbox = {Vector::Constant(n, -half_extent),
              Vector::Constant(n, half_extent)};
    d.bbox.lo[axis] = e[axis] > 0 ? a : -b;
    d.bbox.hi[axis] = e[axis] > 0 ? b : -a;
  } else {
    const double w = half_extent + std::max(std::abs(a), std::abs(b));
    d.bbox = {Vector::Constant(n, -w), Vector::Constant(n, w)};
  }
  return d;
}

ImplicitDomain superellipse(const Vector& semi_axes, int exponent) {
  if (exponent < 2 || exponent % 2 != 0 || !(semi_axes.array() > 0.0).all()) {
    throw ConfigError("superellipse needs an even exponent >= 2");
  }
  ImplicitDomain d;
  d.name = "superellipse";
  d.dim = static_cast<int>(semi_axes.size());
  const int m = exponent;
  d.phi = [semi_axes, m](const Vector& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      s += std::pow(x[i] / semi_axes[i], m);
    }
    return s - 1.0;
  };
  d.grad_phi = [semi_axes, m](const Vector& x) -> Vector {
    Vector g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      g[i] = m * std::pow(x[i] / semi_axes[i], m - 1) / semi_axes[i];
    }
    return g;
  };
  d.hess_phi = [semi_axes, m](const Vector& x) -> Matrix {
    Vector diag(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      diag[i] = m * (m - 1) * std::pow(x[i] / semi_axes[i], m - 2) /
                (semi_axes[i] * semi_axes[i]);
    }
    return diag.asDiagonal();
  };
  d.bbox = {-semi_axes, semi_axes};
  return d;
}

namespace {

Vector head(const std::vector<double>& p, std::size_t from, int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = p[from + i];
  return v;
}

}  // namespace

ImplicitDomain builtin_domain(const std::string& kind,
                              const std::vector<double>& params, int dim) {
  const auto sz = params.size();
  const auto n = static_cast<std::size_t>(dim);
  if (kind == "ball") {
    if (sz == 1) return ball(Vector::Zero(dim), params[0]);
    if (sz == n + 1) return ball(head(params, 0, dim), params[n]);
    throw ConfigError("ball params: 'r' or 'c_1 .. c_n r'");
  }
  if (kind == "ellipsoid") {
    if (sz == n) return ellipsoid(Vector::Zero(dim), head(params, 0, dim));
    if (sz == 2 * n) {
      return ellipsoid(head(params, 0, dim), head(params, n, dim));
    }
    throw ConfigError("ellipsoid params: 'a_1 .. a_n' or 'c_1 .. c_n a_1 .. a_n'");
  }
  if (kind == "slab") {
    if (sz == n + 3) {
      return slab(head(params, 0, dim), params[n], params[n + 1],
                  params[n + 2]);
    }
    throw ConfigError("slab params: 'e_1 .. e_n a b half_extent'");
  }
  if (kind == "superellipse") {
    if (sz == n + 1) {
      const double m = params[n];
      if (m != std::round(m)) {
        throw ConfigError("superellipse exponent must be an integer");
      }
      return superellipse(head(params, 0, dim), static_cast<int>(m));
    }
    throw ConfigError("superellipse params: 'a_1 .. a_n m'");
  }
  throw ConfigError("unknown domain kind '" + kind + "'");
}

}  // namespace subeik
