#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace subeik {

/// Exit statuses of `run`.
enum ExitStatus : int {
  kExitOk = 0,
  kExitFailed = 1,  // verify criteria failed, or an unexpected failure
  kExitConfig = 2,
  kExitNumerical = 3,
};

/// Executes one subcommand (solve, trace, conjugate, singular, study,
/// verify). Artifacts go under output.dir; a short summary goes to `out`,
/// errors to `err` with the error name first.
int run(const std::string& subcommand, const std::string& config_path,
        const std::vector<std::string>& overrides, std::ostream& out,
        std::ostream& err);

}  // namespace subeik
