#pragma once

// Scenario configuration: flat "key = value" text with dotted sections.
//
//   problem          = line | radial
//   mass.family      = constant | coulomb_deformed | quadratic_well
//   mass.m0, mass.kappa
//   potential.family = coulomb | harmonic
//   potential.Z, potential.e          (coulomb)
//   potential.m0, potential.omega     (harmonic)
//   ambiguity        = BD, LK, GW, (a b g) ...
//   levels           = 0, 1, 2        (line: node count)
//                    = 1:0, 2:1       (radial: n:l)
//   grid.box, grid.n   (default spacing 0.02 on a line, 0.04 radially)
//   solve.converge, solve.rel_tol, solve.max_box_doublings, solve.tol
//   sweep.parameter  = kappa | omega | Z | a
//   sweep.start, sweep.stop, sweep.step, sweep.pair
//   verify.reference_mass, verify.assume_mass, verify.assume_laplacian
//   verify.hf.pairs, verify.hf.a, verify.hf.delta, verify.hf.level
//   output
//
// '#' starts a comment. Unknown keys are rejected.

#include "pdm/pdm.hpp"

#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdm::cli {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error("config: " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct NamedAmbiguity {
  std::string name;  // preset name, or "custom"
  AmbiguitySet<double> set;
};

struct SweepSpec {
  std::string parameter;
  double start = 0;
  double stop = 0;
  double step = 1;
  InterpolationPair pair = InterpolationPair::BDvsLK;

  std::vector<double> values() const;
};

struct HfSpec {
  std::vector<InterpolationPair> pairs;
  std::vector<double> a_values;
  double delta = 1e-3;
  std::optional<Level> level;
};

struct VerifySpec {
  std::optional<double> reference_mass;
  std::optional<MassOrderingTag> assume_mass;
  std::optional<LaplacianSignTag> assume_laplacian;
  HfSpec hf;
};

struct Config {
  GridKind kind = GridKind::Line;
  MassProfile<double> mass = MassProfile<double>::constant(1);
  PotentialProfile<double> potential = PotentialProfile<double>::zero();
  std::vector<NamedAmbiguity> ambiguities;
  std::vector<Level> levels;
  // unset: box from default_box(), points from the default spacing
  std::optional<double> box;
  std::optional<Eigen::Index> grid_n;
  bool converge = true;
  ConvergenceOptions<double> convergence;
  std::optional<SweepSpec> sweep;
  VerifySpec verify;
  std::string output;

  /// Line: 10 max(1, 1/sqrt(omega)). Radial: 40 n^2 / Z for the highest n.
  double default_box() const;
  Grid<double> base_grid() const;
  Channel channel(const Level& level) const;
  Problem<double> problem(const Level& level, const AmbiguitySet<double>& amb) const;
  Scenario<double> scenario() const;
  /// Radial Coulomb potential with the deformed mass, which has a closed-form spectrum.
  bool exactly_solvable() const;
};

using KeyValues = std::map<std::string, std::string>;

/// Parse text into key/value pairs. Duplicate keys are an error.
KeyValues parse_key_values(std::istream& in);

Config build_config(const KeyValues& kv);
Config load_config(const std::string& path);

/// Copy of `c` with one scalar parameter replaced (kappa, omega, Z).
Config with_parameter(const Config& c, const std::string& name, double value);

}  // namespace pdm::cli
