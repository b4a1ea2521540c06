// subeik: command line front end.

#include "subeik/app.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  CLI::App app{"Subelliptic eikonal solver"};
  app.require_subcommand(1);

  std::string config;
  std::vector<std::string> overrides;
  bool concat = false;

  const char* names[][2] = {
      {"solve", "Fast sweeping solve; writes field.csv"},
      {"trace", "Backward characteristics; writes trajectory CSVs"},
      {"conjugate", "First conjugate times per seed; writes conjugate.csv"},
      {"singular", "Singular-set scan; writes report.txt and flagged.csv"},
      {"study", "Refinement study over singular.h_list; writes study.csv"},
      {"verify", "Runs the acceptance criteria"},
  };
  for (const auto& [name, help] : names) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "Configuration file")->required();
    sub->add_option("--set", overrides, "Override, key=value (repeatable)")
        ->take_all();
    if (std::string(name) == "trace") {
      sub->add_flag("--concat", concat,
                    "One trajectories.csv with a seed column instead of one file per seed");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : subeik::kExitConfig;
  }
  if (concat) overrides.push_back("output.concat=true");
  const std::string sub = app.get_subcommands().front()->get_name();
  return subeik::run(sub, config, overrides, std::cout, std::cerr);
}
