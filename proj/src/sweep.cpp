#include "subeik/sweep.hpp"

#include "subeik/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace subeik {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Upper initialization; above any finite time on the built-in problems.
constexpr double kLarge = 1e6;
constexpr int kMaxDim = 8;

}  // namespace

double boundary_time_model(double distance, double normal_speed, double ell) {
  const double cap = std::sqrt(distance * ell);
  if (!(normal_speed > 0.0)) return cap;
  return std::min(distance / normal_speed, cap);
}

ValueField solve(const VectorFieldSystem& sys, const ImplicitDomain& dom,
                 Grid grid, const SweepOptions& opts) {
  if (sys.dim != dom.dim || grid.dim() != dom.dim) {
    throw ConfigError("system, domain and grid dimensions differ");
  }
  if (sys.dim > kMaxDim) throw ConfigError("grid solver supports n <= 8");
  grid.classify(dom, opts.ghost_cells);

  const int n = sys.dim;
  const int nf = sys.count;
  const double h = grid.spacing();
  const double ell = 0.5 * dom.diameter();
  const std::size_t size = grid.size();

  ValueField field;
  field.values.assign(size, kNaN);
  field.residual.assign(size, kNaN);

  // Per active node: field matrix (column-major n x N) and row norms, i.e.
  // sup over p of |dH/dp_i|.
  std::vector<double> fields(size * n * nf, 0.0);
  std::vector<double> row_norm(size * n, 0.0);
  for (std::size_t f = 0; f < size; ++f) {
    if (!grid.active(f)) continue;
    const Vector x = grid.point(f);
    const Matrix a = sys.eval(x);
    std::copy(a.data(), a.data() + n * nf, fields.begin() + f * n * nf);
    for (int i = 0; i < n; ++i) row_norm[f * n + i] = a.row(i).norm();

    const double d = std::abs(grid.signed_distance()[f]);
    const Vector g = dom.grad_phi(x);
    const double gn = g.norm();
    double speed = 0.0;
    bool degenerate = true;
    if (gn >= dom.g_min) {
      const Vector nu = g / gn;
      speed = hamiltonian(a, nu);
      degenerate = is_degenerate(a, nu, speed, opts.hamiltonian);
    }
    if (!grid.inside(f)) {
      field.values[f] = -boundary_time_model(d, degenerate ? 0.0 : speed, ell);
    } else if (grid.kind(f) == NodeKind::Band && !degenerate) {
      field.values[f] = boundary_time_model(d, speed, ell);
    } else {
      field.values[f] = kLarge;
    }
  }

  // Dissipation per inside node and axis.
  std::vector<std::size_t> free_nodes;
  std::vector<double> sigma(size * n, 0.0);
  for (std::size_t f = 0; f < size; ++f) {
    if (!grid.inside(f)) continue;
    free_nodes.push_back(f);
    for (int i = 0; i < n; ++i) {
      double s = row_norm[f * n + i];
      for (int a = 0; a < n; ++a) {
        for (int dir : {-1, 1}) {
          std::size_t g;
          if (grid.neighbor(f, a, dir, g) && grid.active(g)) {
            s = std::max(s, row_norm[g * n + i]);
          }
        }
      }
      double floor_i = 0.0;
      for (int j = 0; j < nf; ++j) {
        floor_i = std::max(floor_i, std::abs(fields[(f * nf + j) * n + i]));
      }
      sigma[f * n + i] = std::max(s, opts.sigma_floor * floor_i);
    }
  }
  std::vector<char> is_free(size, 0);
  for (auto f : free_nodes) is_free[f] = 1;

  auto& values = field.values;
  auto update = [&](std::size_t f) -> double {
    if (!is_free[f]) return 0.0;
    double pc[kMaxDim];
    double damp = 0.0;
    double avg = 0.0;
    const double old = values[f];
    for (int i = 0; i < n; ++i) {
      std::size_t g;
      double tp = kNaN, tm = kNaN;
      if (grid.neighbor(f, i, +1, g) && grid.active(g)) tp = values[g];
      if (grid.neighbor(f, i, -1, g) && grid.active(g)) tm = values[g];
      if (std::isnan(tp)) tp = std::isnan(tm) ? old : tm;
      if (std::isnan(tm)) tm = tp;
      pc[i] = (tp - tm) / (2.0 * h);
      const double s = sigma[f * n + i];
      damp += s / h;
      avg += s * (tp + tm) / (2.0 * h);
    }
    if (!(damp > 0.0)) return 0.0;
    const double* a = &fields[f * n * nf];
    double h2 = 0.0;
    for (int j = 0; j < nf; ++j) {
      double dot = 0.0;
      for (int k = 0; k < n; ++k) dot += a[j * n + k] * pc[k];
      h2 += dot * dot;
    }
    const double candidate = std::max(0.0, (1.0 - std::sqrt(h2) + avg) / damp);
    if (candidate < old) {
      values[f] = candidate;
      return old - candidate;
    }
    return 0.0;
  };

  const unsigned orderings = 1u << n;
  int sweeps = 0;
  double last = std::numeric_limits<double>::infinity();
  while (sweeps < opts.max_sweeps) {
    const unsigned ordering = static_cast<unsigned>(sweeps) % orderings;
    double max_change = 0.0;
    for_each_node(grid, ordering, [&](std::size_t f) {
      max_change = std::max(max_change, update(f));
    });
    ++sweeps;
    last = max_change;
    if (max_change < opts.tol) {
      field.converged = true;
      break;
    }
  }
  field.iterations = sweeps;
  field.last_update = last;
  field.grid = std::move(grid);
  compute_residual(sys, field);
  return field;
}

ValueField solve_or_throw(const VectorFieldSystem& sys,
                          const ImplicitDomain& dom, Grid grid,
                          const SweepOptions& opts) {
  ValueField field = solve(sys, dom, std::move(grid), opts);
  if (!field.converged) {
    throw NotConverged("sweep budget of " + std::to_string(opts.max_sweeps) +
                       " exhausted, last update " +
                       std::to_string(field.last_update));
  }
  return field;
}

bool node_gradient(const ValueField& field, std::size_t flat, Vector& grad) {
  const Grid& grid = field.grid;
  const int n = grid.dim();
  grad.resize(n);
  if (!grid.active(flat)) return false;
  for (int a = 0; a < n; ++a) {
    std::size_t p, m;
    if (!grid.neighbor(flat, a, +1, p) || !grid.neighbor(flat, a, -1, m) ||
        !grid.active(p) || !grid.active(m)) {
      return false;
    }
    grad[a] = (field.values[p] - field.values[m]) / (2.0 * grid.spacing());
  }
  return true;
}

bool node_hessian(const ValueField& field, std::size_t flat, Matrix& hess) {
  const Grid& grid = field.grid;
  const int n = grid.dim();
  const double h = grid.spacing();
  const auto& v = field.values;
  hess.resize(n, n);
  if (!grid.active(flat)) return false;
  auto step = [&](std::size_t f, int axis, int dir, std::size_t& out) {
    return grid.neighbor(f, axis, dir, out) && grid.active(out);
  };
  for (int a = 0; a < n; ++a) {
    std::size_t p, m;
    if (!step(flat, a, +1, p) || !step(flat, a, -1, m)) return false;
    hess(a, a) = (v[p] - 2.0 * v[flat] + v[m]) / (h * h);
    for (int b = a + 1; b < n; ++b) {
      std::size_t pp, pm, mp, mm;
      if (!step(p, b, +1, pp) || !step(p, b, -1, pm) || !step(m, b, +1, mp) ||
          !step(m, b, -1, mm)) {
        return false;
      }
      hess(a, b) = hess(b, a) = (v[pp] - v[pm] - v[mp] + v[mm]) / (4.0 * h * h);
    }
  }
  return true;
}

const std::vector<double>& compute_residual(const VectorFieldSystem& sys,
                                            ValueField& field) {
  const Grid& grid = field.grid;
  field.residual.assign(grid.size(), kNaN);
  Vector grad;
  for (std::size_t f = 0; f < grid.size(); ++f) {
    if (!grid.inside(f) || !node_gradient(field, f, grad)) continue;
    field.residual[f] = std::abs(hamiltonian(sys, grid.point(f), grad) - 1.0);
  }
  return field.residual;
}

ResidualStats residual(const ValueField& field,
                       const std::function<bool(std::size_t)>& exclude) {
  ResidualStats stats;
  double sum = 0.0;
  for (std::size_t f = 0; f < field.grid.size(); ++f) {
    const double r = field.residual[f];
    if (std::isnan(r) || (exclude && exclude(f))) continue;
    stats.max = std::max(stats.max, r);
    sum += r;
    ++stats.count;
  }
  if (stats.count > 0) stats.mean = sum / static_cast<double>(stats.count);
  return stats;
}

namespace {

// Visits the 2^n corners of the cell containing x with their multilinear
// weights. Returns false when x is outside the lattice.
template <typename F>
bool for_each_corner(const Grid& grid, const Vector& x, F&& f) {
  std::vector<int> corner;
  Vector frac;
  if (!grid.locate(x, corner, frac)) return false;
  const int n = grid.dim();
  std::vector<int> idx(n);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    double w = 1.0;
    for (int a = 0; a < n; ++a) {
      const bool up = (mask >> a) & 1u;
      idx[a] = corner[a] + (up ? 1 : 0);
      w *= up ? frac[a] : 1.0 - frac[a];
    }
    if (!f(grid.flat(idx), w)) return false;
  }
  return true;
}

}  // namespace

double interpolate_value(const ValueField& field, const Vector& x) {
  double v = 0.0;
  const bool ok = for_each_corner(field.grid, x, [&](std::size_t f, double w) {
    if (!field.grid.active(f)) return false;
    v += w * field.values[f];
    return true;
  });
  return ok ? v : kNaN;
}

bool interpolate_gradient(const ValueField& field, const Vector& x,
                          Vector& grad) {
  grad = Vector::Zero(field.grid.dim());
  Vector g;
  return for_each_corner(field.grid, x, [&](std::size_t f, double w) {
    if (!node_gradient(field, f, g)) return false;
    grad += w * g;
    return true;
  });
}

bool interpolate_hessian(const ValueField& field, const Vector& x,
                         Matrix& hess) {
  const int n = field.grid.dim();
  hess = Matrix::Zero(n, n);
  Matrix m;
  return for_each_corner(field.grid, x, [&](std::size_t f, double w) {
    if (!node_hessian(field, f, m)) return false;
    hess += w * m;
    return true;
  });
}

}  // namespace subeik
