#include "subeik/acceptance.hpp"

#include "subeik/error.hpp"
#include "subeik/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace subeik {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

CriterionResult euclidean_exactness() {
  CriterionResult r{1, "euclidean exactness", false, "", ""};
  const auto t0 = Clock::now();
  const double h = 1.0 / 64;
  const auto dom = ball(Vector::Zero(2), 1.0);
  auto field = solve(euclidean(2), dom, Grid::covering(dom.bbox, h, 2));
  double err = 0.0;
  for (std::size_t f = 0; f < field.grid.size(); ++f) {
    if (!field.grid.inside(f)) continue;
    err = std::max(err, std::abs(field.values[f] - (1.0 - field.grid.point(f).norm())));
  }
  const bool fast = seconds_since(t0) <= 10.0;
  r.pass = field.converged && err <= 5 * h && fast;
  r.detail = fmt("sup |T_h - (1 - |x|)| = %.6g (bound %.6g)", err, 5 * h) +
             (fast ? ", runtime within 10 s" : ", runtime over 10 s");
  std::ostringstream art;
  write_field_csv(art, field);
  r.artifact = art.str();
  return r;
}

CriterionResult hamiltonian_conservation() {
  CriterionResult r{2, "Hamiltonian conservation", false, "", ""};
  const auto t0 = Clock::now();
  const auto sys = heisenberg();
  const auto dom = ball(Vector::Zero(3), 1.0);
  // The poles are characteristic; extra samples replace rejected seeds.
  FlowOptions opts;
  opts.step = 1e-3;
  opts.t_max = 0.8;
  const auto results = wavefront(sys, dom, sample_boundary(dom, 40, 1), opts);
  std::ostringstream art;
  write_trajectory_header(art, 3, true);
  double drift = 0.0;
  int traced = 0;
  for (const auto& res : results) {
    if (!res.ok() || traced == 32) continue;
    drift = std::max(drift, res.trajectory->h_drift);
    write_trajectory_csv(art, *res.trajectory, traced);
    ++traced;
  }
  const bool fast = seconds_since(t0) <= 5.0;
  r.pass = traced == 32 && drift <= 1e-8 && fast;
  r.detail = fmt("%d characteristics, max |H - 1| = %.3g (bound 1e-08)", traced, drift) +
             (fast ? ", runtime within 5 s" : ", runtime over 5 s");
  r.artifact = art.str();
  return r;
}

CriterionResult conjugate_circle() {
  CriterionResult r{3, "conjugate time, circle", false, "", ""};
  const auto sys = euclidean(2);
  const auto dom = ball(Vector::Zero(2), 1.0);
  FlowOptions opts;
  opts.step = 1e-3;
  opts.t_max = 1.5;
  const auto results = wavefront(sys, dom, sample_boundary(dom, 16, 1), opts);
  std::vector<ConjugateRow> rows;
  double worst = 0.0;
  bool all = !results.empty();
  for (const auto& res : results) {
    ConjugateRow row;
    if (!res.ok()) {
      all = false;
      row.status = res.error_kind;
      rows.push_back(row);
      continue;
    }
    row.z = res.trajectory->xi.z;
    row.report = conjugate_time(sys, *res.trajectory);
    all = all && row.report.has_conjugate;
    worst = std::max(worst, std::abs(row.report.t0 - 1.0));
    rows.push_back(row);
  }
  r.pass = all && worst <= 1e-6;
  r.detail = fmt("%zu seeds, max |t0 - 1| = %.3g (bound 1e-06)", results.size(), worst);
  std::ostringstream art;
  write_conjugate_csv(art, rows);
  r.artifact = art.str();
  return r;
}

CriterionResult conjugate_ellipse() {
  CriterionResult r{4, "conjugate time, ellipse", false, "", ""};
  const auto sys = euclidean(2);
  const auto dom = ellipsoid(Vector::Zero(2), vec({2.0, 1.0}));
  FlowOptions opts;
  opts.step = 1e-3;
  opts.t_max = 5.0;
  opts.stop_on_exit = false;
  const auto traj = launch(sys, dom, make_boundary_point(dom, vec({0.0, 1.0})), opts);
  const auto rep = conjugate_time(sys, traj);
  const double err = std::abs(rep.t0 - 4.0);
  r.pass = rep.has_conjugate && err <= 1e-3;
  r.detail = fmt("t0 = %.10g, |t0 - 4| = %.3g (bound 1e-03)", rep.t0, err);
  r.artifact = format_double(rep.t0);
  return r;
}

CriterionResult costate_duality() {
  CriterionResult r{5, "gradient-costate duality", false, "", ""};
  const double h = 1.0 / 64;
  const auto sys = euclidean(2);
  const auto dom = ball(Vector::Zero(2), 1.0);
  const auto field = solve(sys, dom, Grid::covering(dom.bbox, h, 2));
  FlowOptions opts;
  opts.step = 1e-3;
  opts.t_max = 0.8;
  double worst = 0.0;
  std::size_t checked = 0;
  for (const auto& res : wavefront(sys, dom, sample_boundary(dom, 16, 1), opts)) {
    if (!res.ok()) continue;
    const auto d = gradient_costate_defect(*res.trajectory, field, 0.0, 0.8);
    worst = std::max(worst, d.max_defect);
    checked += d.checked;
  }
  r.pass = checked > 0 && worst <= 10 * h;
  r.detail = fmt("max |-P - D_h T| = %.6g (bound %.6g)", worst, 10 * h) +
             ", samples " + std::to_string(checked);
  r.artifact = format_double(worst);
  return r;
}

CriterionResult solver_agreement() {
  CriterionResult r{6, "two-solver agreement", false, "", ""};
  const auto t0 = Clock::now();
  const double h = 1.0 / 32;
  const auto sys = heisenberg();
  const auto dom = ball(Vector::Zero(3), 1.0);
  const Grid grid = Grid::covering(dom.bbox, h, 2);
  const auto sweep = solve(sys, dom, grid);
  const auto dp = dp_oracle(sys, dom, grid);
  double diff = 0.0;
  for (std::size_t f = 0; f < sweep.grid.size(); ++f) {
    if (!sweep.grid.inside(f) || !dp.grid.inside(f)) continue;
    diff = std::max(diff, std::abs(sweep.values[f] - dp.values[f]));
  }
  const bool fast = seconds_since(t0) <= 300.0;
  r.pass = sweep.converged && dp.converged && diff <= 10 * h && fast;
  r.detail = fmt("sup |T_sweep - T_dp| = %.6g (bound %.6g)", diff, 10 * h) +
             (fast ? ", runtime within 5 min" : ", runtime over 5 min");
  r.artifact = format_double(diff);
  return r;
}

bool strictly_decreasing(const std::vector<StudyRow>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!(rows[i].measure_c11 > 0.0)) return false;
    if (i > 0 && !(rows[i].measure_c11 < rows[i - 1].measure_c11)) return false;
  }
  return !rows.empty();
}

struct StudyOutcome {
  CriterionResult decay;
  CriterionResult inclusion;
};

StudyOutcome singular_studies() {
  StudyOutcome out;
  out.decay = {7, "singular-set decay", false, "", ""};
  out.inclusion = {8, "set inclusion", false, "", ""};
  const auto t0 = Clock::now();
  const auto disk = refinement_study(euclidean(2), ball(Vector::Zero(2), 1.0),
                                     {1.0 / 16, 1.0 / 32, 1.0 / 64});
  const auto heis = refinement_study(heisenberg(), ball(Vector::Zero(3), 1.0),
                                     {1.0 / 8, 1.0 / 16, 1.0 / 32});
  const bool fast = seconds_since(t0) <= 600.0;
  const double exponent = disk.back().decay_exponent;
  out.decay.pass = strictly_decreasing(disk) && exponent >= 1.5 &&
                   strictly_decreasing(heis) && fast;
  std::ostringstream d;
  d << "disk measures";
  for (const auto& row : disk) d << ' ' << format_double(row.measure_c11);
  d << fmt(", exponent %.4g (bound %.3g)", exponent, 1.5) << "; heisenberg measures";
  for (const auto& row : heis) d << ' ' << format_double(row.measure_c11);
  d << (fast ? ", runtime within 10 min" : ", runtime over 10 min");
  out.decay.detail = d.str();
  std::ostringstream art;
  write_study_csv(art, disk);
  write_study_csv(art, heis);
  out.decay.artifact = art.str();

  int reports = 0;
  std::size_t lip = 0;
  bool included = true;
  std::ostringstream rep_art;
  for (const auto* rows : {&disk, &heis}) {
    for (const auto& row : *rows) {
      const auto& c11 = row.report.flagged_c11;
      for (auto f : row.report.flagged_lip) {
        included = included && std::binary_search(c11.begin(), c11.end(), f);
      }
      lip += row.report.flagged_lip.size();
      write_report(rep_art, row.report);
      ++reports;
    }
  }
  out.inclusion.pass = included && reports > 0;
  out.inclusion.detail = std::to_string(reports) + " reports, " +
                         std::to_string(lip) + " Lipschitz flags, all in the C11 set";
  if (!included) out.inclusion.detail = std::to_string(reports) + " reports, inclusion violated";
  out.inclusion.artifact = rep_art.str();
  return out;
}

CriterionResult singular_certificate() {
  CriterionResult r{9, "singular certificate", false, "", ""};
  // Abnormal Martinet line y(t) = (0, t, 0) on the plane z = 0, which bounds
  // the slab {-1 < z < 0} with outward normal (0, 0, 1).
  const auto dom = slab(vec({0.0, 0.0, 1.0}), -1.0, 0.0, 1.0);
  const int m = 101;
  std::vector<double> ts;
  std::vector<Vector> y, p, u;
  for (int i = 0; i < m; ++i) {
    const double t = 0.5 * i / (m - 1);
    ts.push_back(t);
    y.push_back(vec({0.0, t, 0.0}));
    p.push_back(vec({0.0, 0.0, 1.0}));
    u.push_back(vec({0.0, 1.0}));
  }
  const auto good = certify_singular_trajectory(martinet(), dom, ts, y, p, u);
  std::vector<Vector> u3(m, vec({0.0, 1.0, 0.0}));
  const auto bad = certify_singular_trajectory(euclidean(3), dom, ts, y, p, u3);
  const double worst = std::max({good.residual_costate, good.residual_onchar,
                                 good.angle_defect});
  r.pass = good.valid && worst <= 1e-12 && std::abs(good.lambda - 1.0) <= 1e-12 &&
           !bad.valid;
  r.detail = std::string("martinet ") + (good.valid ? "VALID" : "INVALID") +
             fmt(", max residual %.3g (bound 1e-12), lambda %.12g", worst, good.lambda) +
             "; euclidean " + (bad.valid ? "VALID" : "INVALID") +
             fmt(", onchar residual %.6g", bad.residual_onchar);
  SingularityReport rep;
  rep.certificates = {good, bad};
  std::ostringstream art;
  write_report(art, rep);
  r.artifact = art.str();
  return r;
}

CriterionResult characteristic_detector() {
  CriterionResult r{10, "characteristic-point detector", false, "", ""};
  const auto sys = heisenberg();
  const auto dom = slab(vec({0.0, 0.0, 1.0}), -0.5, 0.0, 1.0);
  const auto samples = sample_boundary(dom, 400, 1);
  // Sample spacing: largest nearest-neighbour distance.
  double spacing = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double nn = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < samples.size(); ++j) {
      if (i != j) nn = std::min(nn, (samples[i].z - samples[j].z).norm());
    }
    spacing = std::max(spacing, nn);
  }
  // H(z, nu) = |(x, y)| / 2 here, so detections lie within spacing / 2 of
  // the axis.
  const double tol = 0.25 * spacing;
  const std::vector<Vector> truth = {vec({0.0, 0.0, 0.0}), vec({0.0, 0.0, -0.5})};
  std::vector<Vector> detected;
  for (const auto& s : samples) {
    if (is_characteristic_point(sys, dom, s.z, tol)) detected.push_back(s.z);
  }
  double far = 0.0;
  for (const auto& z : detected) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& c : truth) d = std::min(d, (z - c).norm());
    far = std::max(far, d);
  }
  double miss = 0.0;
  for (const auto& c : truth) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& z : detected) d = std::min(d, (z - c).norm());
    miss = std::max(miss, d);
  }
  r.pass = !detected.empty() && far <= spacing && miss <= spacing;
  r.detail = std::to_string(detected.size()) + " detected of " +
             std::to_string(samples.size()) +
             fmt(", farthest from axis set %.6g, worst miss %.6g", far, miss) +
             fmt(" (spacing %.6g)", spacing);
  std::ostringstream art;
  for (const auto& z : detected) {
    art << format_double(z[0]) << ',' << format_double(z[1]) << ','
        << format_double(z[2]) << '\n';
  }
  r.artifact = art.str();
  return r;
}

std::vector<CriterionResult> run_core() {
  std::vector<CriterionResult> out;
  out.push_back(euclidean_exactness());
  out.push_back(hamiltonian_conservation());
  out.push_back(conjugate_circle());
  out.push_back(conjugate_ellipse());
  out.push_back(costate_duality());
  out.push_back(solver_agreement());
  auto studies = singular_studies();
  out.push_back(std::move(studies.decay));
  out.push_back(std::move(studies.inclusion));
  out.push_back(singular_certificate());
  out.push_back(characteristic_detector());
  return out;
}

}  // namespace

std::vector<CriterionResult> run_acceptance() {
  auto first = run_core();
  const auto second = run_core();
  CriterionResult det{11, "determinism", true, "", ""};
  std::vector<int> differing;
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (first[i].detail != second[i].detail || first[i].artifact != second[i].artifact ||
        first[i].pass != second[i].pass) {
      differing.push_back(first[i].id);
    }
  }
  det.pass = differing.empty();
  if (det.pass) {
    det.detail = "two runs of criteria 1-10 agree byte for byte";
  } else {
    det.detail = "outputs differ for criteria";
    for (int id : differing) det.detail += " " + std::to_string(id);
  }
  first.push_back(det);
  return first;
}

void print_results(std::ostream& out, const std::vector<CriterionResult>& results) {
  for (const auto& r : results) {
    out << (r.pass ? "PASS " : "FAIL ") << r.id << ' ' << r.name << ": "
        << r.detail << '\n';
  }
}

bool all_passed(const std::vector<CriterionResult>& results) {
  return !results.empty() &&
         std::all_of(results.begin(), results.end(),
                     [](const CriterionResult& r) { return r.pass; });
}

}  // namespace subeik
