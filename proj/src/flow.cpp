#include "subeik/flow.hpp"

#include "subeik/error.hpp"
#include "subeik/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace subeik {
namespace {

CharacteristicState axpy(const CharacteristicState& s, double a,
                         const CharacteristicState& k) {
  return {s.x + a * k.x, s.p + a * k.p, s.m + a * k.m, s.pjac + a * k.pjac};
}

double effective_step(const ImplicitDomain& dom, const FlowOptions& opts) {
  return opts.step > 0.0 ? opts.step : 1e-3 * dom.diameter();
}

}  // namespace

CharacteristicState initial_state(const VectorFieldSystem& sys,
                                  const ImplicitDomain& dom,
                                  const BoundaryPoint& xi,
                                  const HamiltonianOptions& opts) {
  const int n = sys.dim;
  const Vector& nu = xi.normal;
  // Gradients at (z, nu); H is 1-homogeneous in p.
  const HamiltonianGradients gn = hamiltonian_gradients(sys, xi.z, nu, opts);
  const double h0 = gn.value;

  CharacteristicState s;
  s.x = xi.z;
  s.p = nu / h0;
  const HamiltonianGradients g0 = hamiltonian_gradients(sys, s.x, s.p, opts);
  s.m.resize(n, n);
  s.pjac.resize(n, n);
  s.m.col(0) = -g0.grad_p;
  s.pjac.col(0) = g0.grad_x;

  const Vector grad_phi = dom.grad_phi(xi.z);
  const Matrix shape = (Matrix::Identity(n, n) - nu * nu.transpose()) *
                       dom.hessian(xi.z) / grad_phi.norm();
  for (int k = 0; k + 1 < n; ++k) {
    const Vector e = xi.chart_basis.col(k);
    const Vector dnu = shape * e;
    const double dh = gn.grad_x.dot(e) + gn.grad_p.dot(dnu);
    s.m.col(k + 1) = e;
    s.pjac.col(k + 1) = dnu / h0 - nu * (dh / (h0 * h0));
  }
  return s;
}

CharacteristicState flow_rhs(const VectorFieldSystem& sys,
                             const CharacteristicState& s,
                             const HamiltonianOptions& opts) {
  const HamiltonianGradients g = hamiltonian_gradients(sys, s.x, s.p, opts);
  const HamiltonianHessians hs = hamiltonian_hessians(sys, s.x, s.p, opts);
  CharacteristicState d;
  d.x = -g.grad_p;
  d.p = g.grad_x;
  d.m = -(hs.px * s.m + hs.pp * s.pjac);
  d.pjac = hs.xx * s.m + hs.px.transpose() * s.pjac;
  return d;
}

CharacteristicState rk4_step(const VectorFieldSystem& sys,
                             const CharacteristicState& s, double dt,
                             const HamiltonianOptions& opts) {
  const CharacteristicState k1 = flow_rhs(sys, s, opts);
  const CharacteristicState k2 = flow_rhs(sys, axpy(s, 0.5 * dt, k1), opts);
  const CharacteristicState k3 = flow_rhs(sys, axpy(s, 0.5 * dt, k2), opts);
  const CharacteristicState k4 = flow_rhs(sys, axpy(s, dt, k3), opts);
  CharacteristicState out = axpy(s, dt / 6.0, k1);
  out = axpy(out, dt / 3.0, k2);
  out = axpy(out, dt / 3.0, k3);
  return axpy(out, dt / 6.0, k4);
}

CharacteristicTrajectory launch(const VectorFieldSystem& sys,
                                const ImplicitDomain& dom,
                                const BoundaryPoint& xi,
                                const FlowOptions& opts) {
  const double speed = hamiltonian(sys, xi.z, xi.normal);
  if (!(speed > opts.char_tol)) {
    throw CharacteristicLaunch("H(xi, nu) = " + std::to_string(speed) +
                               " at a characteristic boundary point");
  }
  CharacteristicTrajectory traj;
  traj.xi = xi;
  const double step = effective_step(dom, opts);
  const int steps = std::max(1, static_cast<int>(std::ceil(opts.t_max / step - 1e-9)));
  const double dt = opts.t_max / steps;
  traj.step = dt;

  CharacteristicState s = initial_state(sys, dom, xi, opts.hamiltonian);
  auto record = [&](double t, const CharacteristicState& st) {
    traj.times.push_back(t);
    traj.det_m.push_back(st.m.determinant());
    const double h = hamiltonian(sys, st.x, st.p);
    traj.ham.push_back(h);
    traj.h_drift = std::max(traj.h_drift, std::abs(h - 1.0));
    traj.states.push_back(st);
  };
  record(0.0, s);
  traj.t_end = opts.t_max;

  double phi_prev = dom.phi(s.x);
  bool been_inside = false;
  for (int i = 1; i <= steps; ++i) {
    CharacteristicState next = rk4_step(sys, s, dt, opts.hamiltonian);
    const double t = i * dt;
    if (opts.stop_on_exit) {
      const double phi = dom.phi(next.x);
      if (been_inside && phi > 0.0) {
        const double frac = phi_prev / (phi_prev - phi);
        traj.t_end = t - dt + frac * dt;
        traj.exited = true;
        break;
      }
      if (phi < 0.0) been_inside = true;
      phi_prev = phi;
    }
    s = std::move(next);
    record(t, s);
  }
  return traj;
}

ConjugateReport conjugate_time(const VectorFieldSystem& sys,
                               const CharacteristicTrajectory& traj,
                               double root_tol,
                               const HamiltonianOptions& opts) {
  ConjugateReport report;
  if (traj.size() < 2) return report;
  double scale = 0.0;
  for (double d : traj.det_m) scale = std::max(scale, std::abs(d));
  const double det_floor = 1e-12 * scale;

  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double a = traj.det_m[i - 1];
    const double b = traj.det_m[i];
    if (std::abs(b) <= det_floor) {
      report = {true, traj.times[i], traj.times[i], traj.times[i], b, b};
      return report;
    }
    if ((a < 0.0) == (b < 0.0)) continue;

    // Bisection, re-integrating from the stored state at the lower end.
    double t_lo = traj.times[i - 1], t_hi = traj.times[i];
    double d_lo = a, d_hi = b;
    CharacteristicState s_lo = traj.states[i - 1];
    while (t_hi - t_lo > root_tol) {
      const double t_mid = 0.5 * (t_lo + t_hi);
      const CharacteristicState s_mid =
          rk4_step(sys, s_lo, t_mid - t_lo, opts);
      const double d_mid = s_mid.m.determinant();
      if (d_mid == 0.0) {
        t_lo = t_hi = t_mid;
        d_lo = d_hi = 0.0;
        break;
      }
      if ((d_mid < 0.0) == (d_lo < 0.0)) {
        t_lo = t_mid;
        d_lo = d_mid;
        s_lo = s_mid;
      } else {
        t_hi = t_mid;
        d_hi = d_mid;
      }
    }
    report.has_conjugate = true;
    report.t_lo = t_lo;
    report.t_hi = t_hi;
    report.det_lo = d_lo;
    report.det_hi = d_hi;
    report.t0 = (d_hi == d_lo) ? t_lo : t_lo + d_lo / (d_lo - d_hi) * (t_hi - t_lo);
    return report;
  }
  return report;
}

std::vector<LaunchResult> wavefront(const VectorFieldSystem& sys,
                                    const ImplicitDomain& dom,
                                    const std::vector<BoundaryPoint>& seeds,
                                    const FlowOptions& opts) {
  std::vector<LaunchResult> out(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    try {
      out[i].trajectory = launch(sys, dom, seeds[i], opts);
    } catch (const Error& e) {
      out[i].error_kind = e.kind();
      out[i].error_message = e.what();
    }
  });
  return out;
}

DualityDefect gradient_costate_defect(const CharacteristicTrajectory& traj,
                                      const ValueField& field, double t_lo,
                                      double t_hi) {
  DualityDefect out;
  Vector grad;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    if (t < t_lo || t > t_hi) continue;
    const CharacteristicState& s = traj.states[i];
    if (!interpolate_gradient(field, s.x, grad)) continue;
    out.max_defect = std::max(out.max_defect, (grad + s.p).norm());
    ++out.checked;
  }
  return out;
}

double second_order_defect(
    const CharacteristicTrajectory& traj, double t_lo, double t_hi,
    const std::function<Matrix(const Vector&)>& hessian_of_value) {
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    if (t < t_lo || t > t_hi) continue;
    const CharacteristicState& s = traj.states[i];
    worst = std::max(worst, (hessian_of_value(s.x) * s.m + s.pjac).norm());
  }
  return worst;
}

HessianProfile hessian_profile(const CharacteristicTrajectory& traj,
                               const ValueField& field, double t_lo,
                               double t_hi) {
  HessianProfile out;
  Matrix hess;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    if (t < t_lo || t > t_hi) continue;
    if (!interpolate_hessian(field, traj.states[i].x, hess)) continue;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(hess, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    out.times.push_back(t);
    out.lambda_min.push_back(ev[0]);
    out.lambda_max.push_back(ev[ev.size() - 1]);
    out.lower_constant = std::max(out.lower_constant, -ev[0]);
  }
  return out;
}

}  // namespace subeik
