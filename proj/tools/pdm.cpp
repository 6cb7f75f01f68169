// pdm: bound states and ordering checks for position-dependent-mass problems.
//
//   pdm solve         --config FILE [--out FILE] [--grid-n N] [--box L] [--jobs J]
//   pdm sweep         ...
//   pdm verify        ...
//   pdm coulomb-exact ...

#include "pdm/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Position-dependent-mass Schroedinger solver"};
  app.require_subcommand(1);

  pdm::cli::RunOptions opts;
  long grid_n = 0;
  double box = 0;

  const std::pair<const char*, const char*> commands[] = {
      {"solve", "Converged energies for every (level, ambiguity) pair"},
      {"sweep", "Energies along a parameter sweep"},
      {"verify", "Check the predicted orderings and Hellmann-Feynman identities"},
      {"coulomb-exact", "Closed-form deformed Coulomb levels, no solver"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config_path, "Scenario file")->required();
    sub->add_option("--out", opts.out_path, "Output file (default: stdout)");
    sub->add_option("--grid-n", grid_n, "Override grid.n");
    sub->add_option("--box", box, "Override grid.box");
    sub->add_option("--jobs", opts.jobs, "Worker threads")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pdm::cli::kConfigError;
  }

  for (CLI::App* sub : app.get_subcommands()) {
    opts.command = sub->get_name();
    if (sub->count("--grid-n")) opts.grid_n = grid_n;
    if (sub->count("--box")) opts.box = box;
  }
  return pdm::cli::run(opts, std::cout, std::cerr);
}
