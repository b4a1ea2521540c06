#include "subeik/singular.hpp"

#include "subeik/error.hpp"
#include "subeik/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace subeik {

double SingularThresholds::lip_cut(double h) const {
  return lip_scale / std::pow(h, lip_power);
}
double SingularThresholds::hess_cut(double h) const {
  return hess_scale / std::pow(h, hess_power);
}
double SingularThresholds::prox_cap(double h) const {
  return prox_scale / std::pow(h, prox_power);
}
double SingularThresholds::third_cut(double h) const {
  return third_scale / (h * h);
}

std::string_view to_string(PointClass c) {
  switch (c) {
    case PointClass::SmoothCandidate: return "smooth-candidate";
    case PointClass::C11Singular: return "C11-singular";
    case PointClass::LipschitzSingular: return "Lipschitz-singular";
  }
  return "smooth-candidate";
}

namespace {

// Calls f(neighbor_flat, offset) for every lattice offset in [-r, r]^n other
// than zero. Returns false (and stops) if an offset leaves the lattice or f
// returns false.
template <typename F>
bool for_each_offset(const Grid& grid, std::size_t node, int r, F&& f) {
  const int n = grid.dim();
  const std::vector<int> base = grid.index(node);
  std::vector<int> off(n, -r);
  std::vector<int> idx(n);
  while (true) {
    bool zero = true;
    bool inside = true;
    for (int a = 0; a < n; ++a) {
      idx[a] = base[a] + off[a];
      zero = zero && off[a] == 0;
      inside = inside && idx[a] >= 0 && idx[a] < grid.dims()[a];
    }
    if (!zero) {
      if (!f(inside ? grid.flat(idx) : grid.size(), off)) return false;
    }
    int a = 0;
    for (; a < n; ++a) {
      if (++off[a] <= r) break;
      off[a] = -r;
    }
    if (a == n) return true;
  }
}

double offset_norm(const std::vector<int>& off) {
  double s = 0.0;
  for (int o : off) s += static_cast<double>(o) * o;
  return std::sqrt(s);
}

}  // namespace

ProximalTestResult proximal_test(const ValueField& field, std::size_t node,
                                 int rho_cells, double c_max) {
  const Grid& grid = field.grid;
  const double h = grid.spacing();
  Vector p;
  if (!grid.inside(node) || !node_gradient(field, node, p)) {
    throw StencilClipped("no centered gradient at node " + std::to_string(node));
  }
  const double tx = field.values[node];
  double c_fit = 0.0;
  const bool full = for_each_offset(
      grid, node, rho_cells, [&](std::size_t y, const std::vector<int>& off) {
        const double r = offset_norm(off);
        if (r > rho_cells) return true;
        if (y >= grid.size() || !grid.inside(y)) return false;
        double lin = 0.0;
        for (int a = 0; a < grid.dim(); ++a) lin += p[a] * off[a] * h;
        const double gap = field.values[y] - tx - lin;
        const double dist2 = r * r * h * h;
        c_fit = std::max(c_fit, -gap / dist2);
        return true;
      });
  if (!full) {
    throw StencilClipped("proximal neighbourhood leaves the domain at node " +
                         std::to_string(node));
  }
  ProximalTestResult out;
  out.node = node;
  out.rho = rho_cells * h;
  out.has_proximal = c_fit <= c_max;
  out.c = std::min(c_fit, c_max);
  return out;
}

namespace {

double lip_quotient(const ValueField& field, std::size_t node) {
  const Grid& grid = field.grid;
  const double tx = field.values[node];
  double q = 0.0;
  for_each_offset(grid, node, 1,
                  [&](std::size_t y, const std::vector<int>& off) {
                    if (y < grid.size() && grid.active(y)) {
                      q = std::max(q, std::abs(field.values[y] - tx) /
                                          (offset_norm(off) * grid.spacing()));
                    }
                    return true;
                  });
  return q;
}

bool scan_node(const ValueField& field, std::size_t f,
               const SingularThresholds& params,
               SemiconcavityTestResult& r) {
  const Grid& grid = field.grid;
  const double h = grid.spacing();
  Matrix hess;
  if (!grid.inside(f) || !node_hessian(field, f, hess)) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hess, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  r.node = f;
  r.lambda_min = ev[0];
  r.lambda_max = ev[ev.size() - 1];
  r.lip_quotient = lip_quotient(field, f);
  r.c11_violation = r.lambda_max > params.hess_cut(h);
  try {
    const auto prox = proximal_test(field, f, params.rho_cells, params.prox_cap(h));
    r.proximal_tested = true;
    r.has_proximal = prox.has_proximal;
  } catch (const StencilClipped&) {
    r.proximal_tested = false;
    r.has_proximal = true;
  }
  r.lip_flag = r.lip_quotient > params.lip_cut(h);
  r.c11_flag = r.lip_flag || r.c11_violation || !r.has_proximal;
  return true;
}

}  // namespace

std::vector<SemiconcavityTestResult> semiconcavity_scan(
    const ValueField& field, const SingularThresholds& params) {
  std::vector<SemiconcavityTestResult> out;
  SemiconcavityTestResult r;
  for (std::size_t f = 0; f < field.grid.size(); ++f) {
    if (scan_node(field, f, params, r)) out.push_back(r);
  }
  return out;
}

PointClass classify_point(const ValueField& field, std::size_t node,
                          const SingularThresholds& params) {
  SemiconcavityTestResult r;
  if (!scan_node(field, node, params, r)) {
    throw StencilClipped("node " + std::to_string(node) +
                         " has no second-difference stencil");
  }
  if (r.lip_flag) return PointClass::LipschitzSingular;
  if (r.c11_flag) return PointClass::C11Singular;
  return PointClass::SmoothCandidate;
}

std::vector<std::size_t> third_difference_flags(
    const ValueField& field, const SingularThresholds& params) {
  const Grid& grid = field.grid;
  const int n = grid.dim();
  const double h = grid.spacing();
  const double cut = params.third_cut(h);
  const auto& v = field.values;

  // Axis directions and face diagonals; ridges crossing the lattice at 45
  // degrees are invisible to axis differences alone.
  std::vector<std::vector<int>> dirs;
  for (int a = 0; a < n; ++a) {
    std::vector<int> d(n, 0);
    d[a] = 1;
    dirs.push_back(d);
    for (int b = a + 1; b < n; ++b) {
      for (int s : {1, -1}) {
        std::vector<int> e(n, 0);
        e[a] = 1;
        e[b] = s;
        dirs.push_back(e);
      }
    }
  }

  std::vector<std::size_t> out;
  std::vector<int> idx(n);
  for (std::size_t f = 0; f < grid.size(); ++f) {
    if (!grid.inside(f)) continue;
    const std::vector<int> base = grid.index(f);
    auto at = [&](const std::vector<int>& d, int k, std::size_t& y) {
      for (int a = 0; a < n; ++a) {
        idx[a] = base[a] + k * d[a];
        if (idx[a] < 0 || idx[a] >= grid.dims()[a]) return false;
      }
      y = grid.flat(idx);
      return grid.active(y);
    };
    double worst = 0.0;
    bool ok = true;
    for (const auto& d : dirs) {
      std::size_t p1, p2, m1, m2;
      if (!at(d, 1, p1) || !at(d, 2, p2) || !at(d, -1, m1) || !at(d, -2, m2)) {
        // A missing axis stencil disqualifies the node; diagonals are optional.
        if (std::count(d.begin(), d.end(), 0) == n - 1) {
          ok = false;
          break;
        }
        continue;
      }
      const double step = h * offset_norm(d);
      const double d3 =
          (v[p2] - 2.0 * v[p1] + 2.0 * v[m1] - v[m2]) / (2.0 * step * step * step);
      worst = std::max(worst, std::abs(d3));
    }
    if (ok && worst > cut) out.push_back(f);
  }
  return out;
}

std::vector<std::size_t> dilate(const Grid& grid,
                                const std::vector<std::size_t>& nodes) {
  std::vector<char> mark(grid.size(), 0);
  for (auto f : nodes) {
    mark[f] = 1;
    for_each_offset(grid, f, 1, [&](std::size_t y, const std::vector<int>&) {
      if (y < grid.size()) mark[y] = 1;
      return true;
    });
  }
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < grid.size(); ++f) {
    if (mark[f]) out.push_back(f);
  }
  return out;
}

SingularityCertificate certify_singular_trajectory(
    const VectorFieldSystem& sys, const ImplicitDomain& dom,
    const std::vector<double>& times, const std::vector<Vector>& y,
    const std::vector<Vector>& p, const std::vector<Vector>& u,
    const CertificateTolerances& tols) {
  const std::size_t m = times.size();
  if (m < 2 || y.size() != m || p.size() != m || u.size() != m) {
    throw MeshMismatch("time, trajectory, costate and control samples must "
                       "share one mesh of at least two points");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (y[i].size() != sys.dim || p[i].size() != sys.dim ||
        u[i].size() != sys.count) {
      throw MeshMismatch("sample " + std::to_string(i) + " has wrong size");
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw MeshMismatch("time mesh must be strictly increasing");
    }
  }
  const double end_phi = dom.phi(y.back());
  if (std::abs(end_phi) > dom.proj_tol()) {
    throw EndpointOffBoundary("|phi(y(T))| = " + std::to_string(std::abs(end_phi)));
  }

  SingularityCertificate cert;
  cert.times = times;
  cert.y = y;
  cert.p = p;
  cert.nonvanishing = std::numeric_limits<double>::infinity();

  std::vector<Vector> costate_rhs(m), dynamics_rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Matrix a = sys.eval(y[i]);
    const auto jac = sys.jac(y[i]);
    Vector rhs = Vector::Zero(sys.dim);
    for (int j = 0; j < sys.count; ++j) rhs += u[i][j] * (jac[j].transpose() * p[i]);
    costate_rhs[i] = rhs;
    dynamics_rhs[i] = a * u[i];
    cert.residual_onchar = std::max(
        cert.residual_onchar, (a.transpose() * p[i]).cwiseAbs().maxCoeff());
    cert.nonvanishing = std::min(cert.nonvanishing, p[i].norm());
  }
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double dt = times[i + 1] - times[i];
    const Vector dp = (p[i + 1] - p[i]) / dt;
    const Vector dy = (y[i + 1] - y[i]) / dt;
    cert.residual_costate =
        std::max(cert.residual_costate,
                 (dp - 0.5 * (costate_rhs[i] + costate_rhs[i + 1]))
                     .cwiseAbs()
                     .maxCoeff());
    cert.residual_dynamics =
        std::max(cert.residual_dynamics,
                 (dy - 0.5 * (dynamics_rhs[i] + dynamics_rhs[i + 1]))
                     .cwiseAbs()
                     .maxCoeff());
  }

  const Vector nu = outward_normal(dom, y.back());
  const Vector& pend = p.back();
  cert.lambda = pend.dot(nu);
  cert.angle_defect = pend.norm() > 0.0 ? (pend.normalized() - nu).norm()
                                        : std::numeric_limits<double>::infinity();
  cert.valid = cert.residual_costate <= tols.ode &&
               cert.residual_onchar <= tols.onchar &&
               cert.angle_defect <= tols.angle && cert.lambda > 0.0 &&
               cert.nonvanishing > 0.0;
  return cert;
}

SingularityReport make_report(const ValueField& field,
                              const std::vector<SemiconcavityTestResult>& scan,
                              const SingularThresholds& params) {
  SingularityReport rep;
  const Grid& grid = field.grid;
  rep.h = grid.spacing();
  rep.dim = grid.dim();
  rep.thresholds = params;
  rep.converged = field.converged;
  rep.iterations = field.iterations;
  const double cell = std::pow(rep.h, rep.dim);
  for (const auto& r : scan) {
    if (!grid.inside(r.node)) continue;
    if (r.lip_flag) rep.flagged_lip.push_back(r.node);
    if (r.c11_flag) rep.flagged_c11.push_back(r.node);
  }
  rep.measure_lip = cell * static_cast<double>(rep.flagged_lip.size());
  rep.measure_c11 = cell * static_cast<double>(rep.flagged_c11.size());
  return rep;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(y[i] > 0.0) || !(x[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++k;
  }
  const double den = k * sxx - sx * sx;
  if (k < 2 || !(std::abs(den) > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return (k * sxy - sx * sy) / den;
}

std::vector<StudyRow> refinement_study(const VectorFieldSystem& sys,
                                       const ImplicitDomain& dom,
                                       const std::vector<double>& h_list,
                                       const SweepOptions& sweep,
                                       const SingularThresholds& params) {
  if (h_list.size() < 3) throw ConfigError("refinement study needs >= 3 spacings");
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    if (!(h_list[i] > 0.0) || (i > 0 && !(h_list[i] < h_list[i - 1]))) {
      throw ConfigError("h_list must be positive and strictly decreasing");
    }
  }
  std::vector<StudyRow> rows(h_list.size());
  parallel_for(h_list.size(), [&](std::size_t i) {
    const double h = h_list[i];
    ValueField field =
        solve(sys, dom, Grid::covering(dom.bbox, h, sweep.ghost_cells), sweep);
    if (!field.converged) {
      throw NotConverged("refinement grid h = " + std::to_string(h) + ": no fixed point after " +
                         std::to_string(field.iterations) + " sweeps");
    }
    rows[i].h = h;
    rows[i].report = make_report(field, semiconcavity_scan(field, params), params);
    rows[i].measure_c11 = rows[i].report.measure_c11;
    rows[i].measure_lip = rows[i].report.measure_lip;
  });
  std::vector<double> hs, ms;
  for (auto& row : rows) {
    hs.push_back(row.h);
    ms.push_back(row.measure_c11);
    row.decay_exponent = loglog_slope(hs, ms);
  }
  return rows;
}

}  // namespace subeik
