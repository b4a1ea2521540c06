#include "subeik/config.hpp"

#include "subeik/error.hpp"
#include "subeik/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace subeik {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& key) {
  if (key.empty() || key.find('.') == std::string::npos) return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

std::pair<std::string, std::string> split_assignment(const std::string& line,
                                                     const std::string& where) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    throw ConfigError(where + ": expected `section.key = value`");
  }
  std::string key = trim(line.substr(0, eq));
  std::string value = trim(line.substr(eq + 1));
  if (!valid_key(key)) throw ConfigError(where + ": bad key `" + key + "`");
  if (value.empty()) throw ConfigError(where + ": empty value for " + key);
  return {key, value};
}

double to_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(x)) {
    throw ConfigError(key + ": not a finite number: " + v);
  }
  return x;
}

long to_long(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE) {
    throw ConfigError(key + ": not an integer: " + v);
  }
  return x;
}

double positive(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x <= 0.0) throw ConfigError(key + " must be positive");
  return x;
}

double nonnegative(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x < 0.0) throw ConfigError(key + " must be nonnegative");
  return x;
}

int positive_int(const std::string& key, const std::string& v) {
  const long x = to_long(key, v);
  if (x <= 0 || x > 1000000000L) throw ConfigError(key + " must be a positive integer");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got " + v);
}

// Whitespace- or comma-separated numbers.
std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::string s = v;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(to_double(key, tok));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"system.name", [](RunConfig& c, auto&, auto& v) { c.system = v; }},
      {"system.dim", [](RunConfig& c, auto& k, auto& v) { c.system_dim = positive_int(k, v); }},
      {"system.count", [](RunConfig& c, auto& k, auto& v) { c.system_count = positive_int(k, v); }},
      {"system.table", [](RunConfig& c, auto&, auto& v) { c.system_table = v; }},

      {"domain.kind", [](RunConfig& c, auto&, auto& v) { c.domain_kind = v; }},
      {"domain.params", [](RunConfig& c, auto& k, auto& v) { c.domain_params = to_list(k, v); }},

      {"grid.h", [](RunConfig& c, auto& k, auto& v) { c.h = positive(k, v); }},
      {"grid.dims",
       [](RunConfig& c, auto& k, auto& v) {
         c.dims.clear();
         for (double d : to_list(k, v)) {
           if (d != std::floor(d) || d < 3) {
             throw ConfigError(k + ": node counts must be integers >= 3");
           }
           c.dims.push_back(static_cast<int>(d));
         }
       }},
      {"grid.pad",
       [](RunConfig& c, auto& k, auto& v) {
         const long p = to_long(k, v);
         if (p < 0 || p > 64) throw ConfigError(k + " must lie in [0, 64]");
         c.grid_pad = static_cast<int>(p);
       }},

      {"solver.tol", [](RunConfig& c, auto& k, auto& v) { c.sweep.tol = positive(k, v); }},
      {"solver.max_sweeps", [](RunConfig& c, auto& k, auto& v) { c.sweep.max_sweeps = positive_int(k, v); }},
      {"solver.sigma_floor", [](RunConfig& c, auto& k, auto& v) { c.sweep.sigma_floor = positive(k, v); }},
      {"solver.ghost_cells", [](RunConfig& c, auto& k, auto& v) { c.sweep.ghost_cells = positive_int(k, v); }},
      {"solver.h_min",
       [](RunConfig& c, auto& k, auto& v) {
         c.sweep.hamiltonian.h_min = positive(k, v);
         c.flow.hamiltonian.h_min = c.sweep.hamiltonian.h_min;
       }},

      {"flow.step", [](RunConfig& c, auto& k, auto& v) { c.flow.step = positive(k, v); }},
      {"flow.t_max", [](RunConfig& c, auto& k, auto& v) { c.flow.t_max = positive(k, v); }},
      {"flow.seeds", [](RunConfig& c, auto& k, auto& v) { c.seeds = positive_int(k, v); }},
      {"flow.seed_points",
       [](RunConfig& c, auto& k, auto& v) {
         // Points separated by ';', coordinates by spaces or commas.
         c.seed_points.clear();
         std::istringstream in(v);
         std::string chunk;
         while (std::getline(in, chunk, ';')) {
           if (trim(chunk).empty()) continue;
           const auto xs = to_list(k, chunk);
           c.seed_points.push_back(Eigen::Map<const Vector>(
               xs.data(), static_cast<Eigen::Index>(xs.size())));
         }
       }},
      {"flow.stop_on_exit", [](RunConfig& c, auto& k, auto& v) { c.flow.stop_on_exit = to_bool(k, v); }},
      {"flow.char_tol", [](RunConfig& c, auto& k, auto& v) { c.flow.char_tol = positive(k, v); }},
      {"flow.root_tol", [](RunConfig& c, auto& k, auto& v) { c.root_tol = positive(k, v); }},

      {"singular.lip_scale", [](RunConfig& c, auto& k, auto& v) { c.thresholds.lip_scale = positive(k, v); }},
      {"singular.lip_power", [](RunConfig& c, auto& k, auto& v) { c.thresholds.lip_power = nonnegative(k, v); }},
      {"singular.hess_scale", [](RunConfig& c, auto& k, auto& v) { c.thresholds.hess_scale = positive(k, v); }},
      {"singular.hess_power", [](RunConfig& c, auto& k, auto& v) { c.thresholds.hess_power = nonnegative(k, v); }},
      {"singular.prox_scale", [](RunConfig& c, auto& k, auto& v) { c.thresholds.prox_scale = positive(k, v); }},
      {"singular.prox_power", [](RunConfig& c, auto& k, auto& v) { c.thresholds.prox_power = nonnegative(k, v); }},
      {"singular.third_scale", [](RunConfig& c, auto& k, auto& v) { c.thresholds.third_scale = positive(k, v); }},
      {"singular.rho_cells", [](RunConfig& c, auto& k, auto& v) { c.thresholds.rho_cells = positive_int(k, v); }},
      {"singular.h_list",
       [](RunConfig& c, auto& k, auto& v) {
         c.h_list = to_list(k, v);
         for (std::size_t i = 0; i < c.h_list.size(); ++i) {
           if (c.h_list[i] <= 0.0 || (i > 0 && c.h_list[i] >= c.h_list[i - 1])) {
             throw ConfigError(k + " must be positive and strictly decreasing");
           }
         }
       }},

      {"oracle.controls", [](RunConfig& c, auto& k, auto& v) { c.oracle.controls = positive_int(k, v); }},
      {"oracle.step", [](RunConfig& c, auto& k, auto& v) { c.oracle.step = positive(k, v); }},
      {"oracle.tol", [](RunConfig& c, auto& k, auto& v) { c.oracle.tol = positive(k, v); }},
      {"oracle.max_iterations", [](RunConfig& c, auto& k, auto& v) { c.oracle.max_iterations = positive_int(k, v); }},

      {"output.dir", [](RunConfig& c, auto&, auto& v) { c.output_dir = v; }},
      {"output.concat", [](RunConfig& c, auto& k, auto& v) { c.concat = to_bool(k, v); }},

      {"rng.seed",
       [](RunConfig& c, auto& k, auto& v) {
         const long s = to_long(k, v);
         if (s < 0) throw ConfigError(k + " must be nonnegative");
         c.rng_seed = static_cast<std::uint64_t>(s);
       }},
  };
  return table;
}

}  // namespace

ConfigEntries parse_config(std::istream& in) {
  ConfigEntries out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    auto [key, value] = split_assignment(line, "line " + std::to_string(lineno));
    if (!out.emplace(key, value).second) {
      throw ConfigError("line " + std::to_string(lineno) + ": repeated key " + key);
    }
  }
  return out;
}

void apply_override(ConfigEntries& entries, const std::string& assignment) {
  auto [key, value] = split_assignment(assignment, "override `" + assignment + "`");
  entries[key] = value;
}

RunConfig make_run_config(const ConfigEntries& entries) {
  RunConfig cfg;
  const auto& table = setters();
  for (const auto& [key, value] : entries) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown key " + key);
    it->second(cfg, key, value);
  }
  if (cfg.h > 0.0 && !cfg.dims.empty()) {
    throw ConfigError("grid.h and grid.dims are mutually exclusive");
  }
  if (cfg.system == "polynomial" &&
      (cfg.system_count <= 0 || cfg.system_table.empty())) {
    throw ConfigError("polynomial systems need system.count and system.table");
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  ConfigEntries entries = parse_config(in);
  for (const auto& o : overrides) apply_override(entries, o);
  RunConfig cfg = make_run_config(entries);
  const auto parent = std::filesystem::path(path).parent_path();
  cfg.base_dir = parent.empty() ? "." : parent.string();
  return cfg;
}

VectorFieldSystem make_system(const RunConfig& cfg) {
  if (cfg.system != "polynomial") {
    try {
      return builtin_system(cfg.system, cfg.system_dim);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  std::filesystem::path table(cfg.system_table);
  if (table.is_relative()) table = std::filesystem::path(cfg.base_dir) / table;
  std::ifstream in(table);
  if (!in) throw ConfigError("cannot open polynomial table " + table.string());
  auto terms = parse_polynomial_table(in, cfg.system_dim, cfg.system_count);
  return polynomial_system("polynomial", cfg.system_dim, cfg.system_count,
                           std::move(terms));
}

ImplicitDomain make_domain(const RunConfig& cfg, int dim) {
  return builtin_domain(cfg.domain_kind, cfg.domain_params, dim);
}

Grid make_grid(const RunConfig& cfg, const ImplicitDomain& dom) {
  if (cfg.h > 0.0) return Grid::covering(dom.bbox, cfg.h, cfg.grid_pad);
  if (cfg.dims.empty()) throw ConfigError("grid.h or grid.dims is required");
  if (static_cast<int>(cfg.dims.size()) != dom.dim) {
    throw ConfigError("grid.dims needs one node count per dimension");
  }
  // dims counts every node, including grid.pad layers beyond the box.
  double h = 0.0;
  for (int a = 0; a < dom.dim; ++a) {
    const int cells = cfg.dims[a] - 1 - 2 * cfg.grid_pad;
    if (cells < 2) throw ConfigError("grid.dims too small for grid.pad");
    h = std::max(h, (dom.bbox.hi[a] - dom.bbox.lo[a]) / cells);
  }
  Vector origin = dom.bbox.lo.array() - cfg.grid_pad * h;
  return Grid(std::move(origin), h, cfg.dims);
}

std::vector<BoundaryPoint> make_seeds(const RunConfig& cfg,
                                      const ImplicitDomain& dom) {
  if (cfg.seed_points.empty()) return sample_boundary(dom, cfg.seeds, cfg.rng_seed);
  std::vector<BoundaryPoint> out;
  for (const auto& x : cfg.seed_points) {
    if (x.size() != dom.dim) {
      throw ConfigError("flow.seed_points: point of dimension " +
                        std::to_string(x.size()) + ", expected " +
                        std::to_string(dom.dim));
    }
    out.push_back(make_boundary_point(dom, project_to_boundary(dom, x)));
  }
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& kv : setters()) keys.push_back(kv.first);
  return keys;
}

}  // namespace subeik
