#pragma once

#include "subeik/flow.hpp"
#include "subeik/singular.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace subeik {

/// Flat `section.key = value` entries, keyed by the full dotted name.
using ConfigEntries = std::map<std::string, std::string>;

/// Parses `section.key = value` lines; `#` starts a comment. Throws
/// ConfigError on malformed lines or repeated keys.
ConfigEntries parse_config(std::istream& in);

/// Applies one `key=value` override, replacing any earlier value.
void apply_override(ConfigEntries& entries, const std::string& assignment);

struct RunConfig {
  std::string system = "euclidean";
  int system_dim = 2;
  /// Polynomial systems only.
  int system_count = 0;
  std::string system_table;

  std::string domain_kind = "ball";
  std::vector<double> domain_params{1.0};

  /// Either h or dims (node counts per axis) selects the grid.
  double h = 0.0;
  std::vector<int> dims;
  int grid_pad = 2;

  SweepOptions sweep;
  FlowOptions flow;
  int seeds = 8;
  /// Explicit launch points, projected onto the boundary; override `seeds`.
  std::vector<Vector> seed_points;
  double root_tol = 1e-9;

  SingularThresholds thresholds;
  std::vector<double> h_list;

  OracleOptions oracle;

  std::string output_dir = "out";
  bool concat = false;
  std::uint64_t rng_seed = 1;

  /// Directory against which relative paths in the file are resolved.
  std::string base_dir = ".";
};

/// Typed, validated configuration. Unknown keys are rejected.
RunConfig make_run_config(const ConfigEntries& entries);

/// Reads the file, applies the overrides and validates.
RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides = {});

VectorFieldSystem make_system(const RunConfig& cfg);
/// Domain of dimension `dim` (the system dimension).
ImplicitDomain make_domain(const RunConfig& cfg, int dim);
/// Grid over the domain bounding box; ConfigError when neither grid.h nor
/// grid.dims is set.
Grid make_grid(const RunConfig& cfg, const ImplicitDomain& dom);
/// Seeds from `seed_points` when given, otherwise `seeds` boundary samples.
std::vector<BoundaryPoint> make_seeds(const RunConfig& cfg,
                                      const ImplicitDomain& dom);

/// Every accepted key, sorted.
std::vector<std::string> config_keys();

}  // namespace subeik
