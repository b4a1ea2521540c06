#include "subeik/error.hpp"
#include "subeik/singular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace subeik {

std::vector<Vector> control_mesh(int count_fields, int directions) {
  const int nf = count_fields;
  std::vector<Vector> out;
  if (nf == 1) {
    out.push_back(Vector::Constant(1, 1.0));
    out.push_back(Vector::Constant(1, -1.0));
  } else if (nf == 2) {
    for (int k = 0; k < directions; ++k) {
      const double a = 2.0 * std::numbers::pi * k / directions;
      Vector u(2);
      u << std::cos(a), std::sin(a);
      out.push_back(u);
    }
  } else if (nf == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < directions; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / directions;
      const double r = std::sqrt(1.0 - z * z);
      Vector u(3);
      u << r * std::cos(golden * k), r * std::sin(golden * k), z;
      out.push_back(u);
    }
  } else {
    for (int j = 0; j < nf && static_cast<int>(out.size()) < directions; ++j) {
      out.push_back(Vector::Unit(nf, j));
      out.push_back(-Vector::Unit(nf, j));
    }
    std::mt19937_64 rng(0);
    std::normal_distribution<double> gauss;
    while (static_cast<int>(out.size()) < directions) {
      Vector u(nf);
      for (int j = 0; j < nf; ++j) u[j] = gauss(rng);
      out.push_back(u.normalized());
    }
  }
  out.push_back(Vector::Zero(nf));
  return out;
}

namespace {

constexpr int kMaxDim = 8;
constexpr double kLarge = 1e6;

// Multilinear interpolation with inactive corners read as zero; positions
// outside the lattice are clamped onto it.
double interpolate(const Grid& grid, const std::vector<double>& values,
                   const double* y) {
  const int n = grid.dim();
  int corner[kMaxDim];
  double frac[kMaxDim];
  for (int a = 0; a < n; ++a) {
    const double s = std::clamp((y[a] - grid.origin()[a]) / grid.spacing(), 0.0,
                                static_cast<double>(grid.dims()[a] - 1));
    int c = std::min(static_cast<int>(s), grid.dims()[a] - 2);
    corner[a] = c;
    frac[a] = s - c;
  }
  double v = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    double w = 1.0;
    std::size_t f = 0;
    for (int a = 0; a < n; ++a) {
      const bool up = (mask >> a) & 1u;
      w *= up ? frac[a] : 1.0 - frac[a];
      f += grid.stride(a) * static_cast<std::size_t>(corner[a] + (up ? 1 : 0));
    }
    if (w == 0.0) continue;
    const double t = values[f];
    if (!std::isnan(t)) v += w * t;
  }
  return v;
}

}  // namespace

ValueField dp_oracle(const VectorFieldSystem& sys, const ImplicitDomain& dom,
                     Grid grid, const OracleOptions& opts) {
  if (sys.dim != dom.dim || grid.dim() != dom.dim) {
    throw ConfigError("system, domain and grid dimensions differ");
  }
  if (sys.dim > kMaxDim) throw ConfigError("oracle supports n <= 8");
  grid.classify(dom, 1);
  const int n = sys.dim;
  const double h = grid.spacing();
  const double delta = opts.step > 0.0 ? opts.step : h;
  const auto controls = control_mesh(sys.count, opts.controls);
  const std::size_t size = grid.size();

  ValueField field;
  field.values.assign(size, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t f = 0; f < size; ++f) {
    if (grid.active(f)) field.values[f] = grid.inside(f) ? kLarge : 0.0;
  }

  // Per inside node: the displacements delta * A(x) u and whether any of
  // them can reach the boundary.
  struct NodeData {
    std::size_t flat;
    double phi;
    bool near_boundary;
    std::vector<double> moves;  // controls x n
  };
  std::vector<NodeData> nodes;
  std::vector<std::size_t> slot(size, std::numeric_limits<std::size_t>::max());
  for (std::size_t f = 0; f < size; ++f) {
    if (!grid.inside(f)) continue;
    const Vector x = grid.point(f);
    const Matrix a = sys.eval(x);
    NodeData d{f, dom.phi(x), false, {}};
    d.moves.reserve(controls.size() * n);
    double reach = 0.0;
    for (const auto& u : controls) {
      const Vector m = delta * (a * u);
      reach = std::max(reach, m.norm());
      for (int k = 0; k < n; ++k) d.moves.push_back(m[k]);
    }
    d.near_boundary = std::abs(grid.signed_distance()[f]) <= 2.0 * (reach + h);
    slot[f] = nodes.size();
    nodes.push_back(std::move(d));
  }

  auto& values = field.values;
  auto update = [&](std::size_t f) -> double {
    const std::size_t s = slot[f];
    if (s == std::numeric_limits<std::size_t>::max()) return 0.0;
    const NodeData& d = nodes[s];
    const Vector x = grid.point(f);
    double best = values[f];
    double y[kMaxDim];
    Vector yv(n);
    for (std::size_t c = 0; c < controls.size(); ++c) {
      const double* m = &d.moves[c * n];
      for (int k = 0; k < n; ++k) y[k] = x[k] + m[k];
      double cost;
      if (d.near_boundary) {
        for (int k = 0; k < n; ++k) yv[k] = y[k];
        const double phi_y = dom.phi(yv);
        if (phi_y >= 0.0) {
          cost = delta * d.phi / (d.phi - phi_y);
          best = std::min(best, cost);
          continue;
        }
      }
      cost = delta + interpolate(grid, values, y);
      best = std::min(best, cost);
    }
    const double change = values[f] - best;
    values[f] = best;
    return change;
  };

  const unsigned orderings = 1u << n;
  int it = 0;
  double last = std::numeric_limits<double>::infinity();
  while (it < opts.max_iterations) {
    const unsigned ordering = static_cast<unsigned>(it) % orderings;
    double max_change = 0.0;
    for_each_node(grid, ordering, [&](std::size_t f) {
      max_change = std::max(max_change, update(f));
    });
    ++it;
    last = max_change;
    if (max_change < opts.tol) {
      field.converged = true;
      break;
    }
  }
  field.iterations = it;
  field.last_update = last;
  if (!field.converged) {
    throw NotConverged("value iteration stopped after " + std::to_string(it) +
                       " iterations, last change " + std::to_string(last));
  }
  field.grid = std::move(grid);
  compute_residual(sys, field);
  return field;
}

}  // namespace subeik
