#pragma once

// Subcommands behind the pdm tool.
//
// solve columns:
//   level,alpha,beta,gamma,energy,nodes,grid_n,box,converged
// sweep columns (kappa / omega / Z):
//   parameter,value,level,alpha,beta,gamma,energy,nodes,converged,exact_energy,exists,ordering
// sweep columns (a):
//   parameter,value,pair,level,energy
// coulomb-exact columns:
//   kappa,level,alpha,beta,gamma,exact_energy,exists
//
// `level` is the node count on a line and "n:l" in the radial channel.
// `box` is the half-width of a line box and the outer radius of a radial one.
// Empty fields mean "not applicable" or "level does not exist".

#include "pdm/cli/config.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace pdm::cli {

enum ExitCode { kOk = 0, kInconsistent = 1, kConfigError = 2, kSolverFailure = 3 };

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// 12 significant digits, locale independent, no negative zero.
std::string format_number(double v);
std::string format_level(const Level& level, GridKind kind);
void write_csv(std::ostream& out, const Table& t);

struct VerifyReport {
  std::string text;
  bool consistent = true;
};

Table cmd_solve(const Config& c, int jobs = 1);
Table cmd_sweep(const Config& c, int jobs = 1);
Table cmd_coulomb_exact(const Config& c);
VerifyReport cmd_verify(const Config& c, int jobs = 1);

struct RunOptions {
  std::string command;
  std::string config_path;
  std::string out_path;
  std::optional<long> grid_n;
  std::optional<double> box;
  int jobs = 1;
};

/// Load, run and write; maps failures to exit codes. Diagnostics go to `err`.
int run(const RunOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace pdm::cli
