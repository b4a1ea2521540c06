#include "subeik/app.hpp"

#include "subeik/acceptance.hpp"
#include "subeik/config.hpp"
#include "subeik/error.hpp"
#include "subeik/io.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

namespace subeik {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output_dir);
  const fs::path path = fs::path(cfg.output_dir) / name;
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  return f;
}

int do_solve(const RunConfig& cfg, std::ostream& out) {
  const auto sys = make_system(cfg);
  const auto dom = make_domain(cfg, sys.dim);
  auto field = solve_or_throw(sys, dom, make_grid(cfg, dom), cfg.sweep);
  compute_residual(sys, field);
  const auto stats = residual(field);
  auto f = open_output(cfg, "field.csv");
  write_field_csv(f, field);
  out << "sweeps = " << field.iterations << '\n'
      << "residual_max = " << format_double(stats.max) << '\n'
      << "residual_mean = " << format_double(stats.mean) << '\n'
      << "residual_nodes = " << stats.count << '\n';
  return kExitOk;
}

// Seeds that fail to launch are reported and skipped.
std::vector<LaunchResult> launch_all(const RunConfig& cfg,
                                     const VectorFieldSystem& sys,
                                     const ImplicitDomain& dom,
                                     std::vector<BoundaryPoint>& seeds,
                                     std::ostream& out) {
  seeds = make_seeds(cfg, dom);
  auto results = wavefront(sys, dom, seeds, cfg.flow);
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].ok()) {
      out << "seed " << i << ": " << results[i].error_message << '\n';
    }
  }
  return results;
}

int do_trace(const RunConfig& cfg, std::ostream& out) {
  const auto sys = make_system(cfg);
  const auto dom = make_domain(cfg, sys.dim);
  std::vector<BoundaryPoint> seeds;
  const auto results = launch_all(cfg, sys, dom, seeds, out);
  std::size_t traced = 0;
  double drift = 0.0;
  if (cfg.concat) {
    auto f = open_output(cfg, "trajectories.csv");
    write_trajectory_header(f, sys.dim, true);
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (results[i].ok()) write_trajectory_csv(f, *results[i].trajectory, static_cast<int>(i));
    }
  }
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].ok()) continue;
    ++traced;
    drift = std::max(drift, results[i].trajectory->h_drift);
    if (!cfg.concat) {
      auto f = open_output(cfg, "trajectory_" + std::to_string(i) + ".csv");
      write_trajectory_header(f, sys.dim, false);
      write_trajectory_csv(f, *results[i].trajectory);
    }
  }
  out << "traced = " << traced << " of " << results.size() << '\n'
      << "h_drift = " << format_double(drift) << '\n';
  return kExitOk;
}

int do_conjugate(const RunConfig& cfg, std::ostream& out) {
  const auto sys = make_system(cfg);
  const auto dom = make_domain(cfg, sys.dim);
  std::vector<BoundaryPoint> seeds;
  const auto results = launch_all(cfg, sys, dom, seeds, out);
  std::vector<ConjugateRow> rows(results.size());
  std::size_t found = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    rows[i].z = seeds[i].z;
    if (!results[i].ok()) {
      rows[i].status = results[i].error_kind;
      continue;
    }
    rows[i].report = conjugate_time(sys, *results[i].trajectory, cfg.root_tol,
                                    cfg.flow.hamiltonian);
    if (rows[i].report.has_conjugate) ++found;
  }
  auto f = open_output(cfg, "conjugate.csv");
  write_conjugate_csv(f, rows);
  out << "conjugate_points = " << found << " of " << rows.size() << '\n';
  return kExitOk;
}

int do_singular(const RunConfig& cfg, std::ostream& out) {
  const auto sys = make_system(cfg);
  const auto dom = make_domain(cfg, sys.dim);
  const auto field = solve_or_throw(sys, dom, make_grid(cfg, dom), cfg.sweep);
  const auto scan = semiconcavity_scan(field, cfg.thresholds);
  const auto rep = make_report(field, scan, cfg.thresholds);
  {
    auto f = open_output(cfg, "report.txt");
    write_report(f, rep);
  }
  auto f = open_output(cfg, "flagged.csv");
  write_flagged_csv(f, field, scan);
  out << "flagged_c11 = " << rep.flagged_c11.size() << '\n'
      << "flagged_lip = " << rep.flagged_lip.size() << '\n'
      << "measure_c11 = " << format_double(rep.measure_c11) << '\n';
  return kExitOk;
}

int do_study(const RunConfig& cfg, std::ostream& out) {
  if (cfg.h_list.size() < 3) {
    throw ConfigError("study needs singular.h_list with at least three spacings");
  }
  const auto sys = make_system(cfg);
  const auto dom = make_domain(cfg, sys.dim);
  const auto rows = refinement_study(sys, dom, cfg.h_list, cfg.sweep, cfg.thresholds);
  auto f = open_output(cfg, "study.csv");
  write_study_csv(f, rows);
  write_study_csv(out, rows);
  return kExitOk;
}

int do_verify(std::ostream& out) {
  const auto results = run_acceptance();
  print_results(out, results);
  return all_passed(results) ? kExitOk : kExitFailed;
}

}  // namespace

int run(const std::string& subcommand, const std::string& config_path,
        const std::vector<std::string>& overrides, std::ostream& out,
        std::ostream& err) {
  try {
    const RunConfig cfg = load_run_config(config_path, overrides);
    if (subcommand == "solve") return do_solve(cfg, out);
    if (subcommand == "trace") return do_trace(cfg, out);
    if (subcommand == "conjugate") return do_conjugate(cfg, out);
    if (subcommand == "singular") return do_singular(cfg, out);
    if (subcommand == "study") return do_study(cfg, out);
    if (subcommand == "verify") return do_verify(out);
    throw ConfigError("unknown subcommand '" + subcommand + "'");
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailed;
  }
}

}  // namespace subeik
