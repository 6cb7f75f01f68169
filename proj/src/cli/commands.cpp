#include "pdm/cli/commands.hpp"

#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

namespace pdm::cli {

namespace {

// Runs f(0..count-1) on up to `jobs` threads. Results keep index order; the
// lowest-index failure is rethrown.
template <typename F>
auto parallel_map(std::size_t count, int jobs, F f) -> std::vector<decltype(f(std::size_t{}))> {
  using R = decltype(f(std::size_t{}));
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n_threads = std::size_t(std::max(1, jobs));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(n_threads, count); ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  std::vector<R> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

struct Solved {
  bool exists = true;
  double energy = 0;
  int nodes = 0;
  Eigen::Index grid_n = 0;
  double box = 0;
  bool converged = false;
  std::optional<double> exact;
};

double box_of(const Grid<double>& g) { return g.kind() == GridKind::Line ? g.upper() - (g.lower() + g.upper()) / 2 : g.upper(); }

Solved solve_level(const Config& c, const Level& level, const AmbiguitySet<double>& amb) {
  Solved s;
  if (c.exactly_solvable()) {
    const auto exact = pdm_coulomb_level(c.potential.charge(), c.potential.coupling(), c.mass.m0(), c.mass.kappa(),
                                         level.n, level.l, amb);
    s.exists = exact.exists;
    if (s.exists && !amb.preset_name().empty()) s.exact = exact.energy;
    if (!s.exists) return s;
  }
  const Problem<double> p = c.problem(level, amb);
  const int index = level.index(c.kind);
  Grid<double> grid = c.base_grid();
  if (index >= grid.size()) throw std::invalid_argument("level " + format_level(level, c.kind) + " exceeds grid.n");
  try {
    if (c.converge) {
      const ConvergedEnergy<double> e = converged_energy(p, grid, index, c.convergence);
      s.energy = e.energy;
      s.converged = e.converged;
      grid = e.final_grid;
    } else {
      s.energy = grid_energy(p, grid, index, c.convergence.bisection_tol);
    }
    const SymmetricTridiagonal<double> h = assemble(p, grid);
    const double e = eigenvalue_by_index(h, index, c.convergence.bisection_tol);
    s.nodes = count_nodes(inverse_iteration(h, e, c.convergence.bisection_tol));
  } catch (const SolverError& e) {
    throw SolverError(p.describe() + " level " + format_level(level, c.kind) + ": " + e.what());
  }
  s.grid_n = grid.size();
  s.box = box_of(grid);
  return s;
}

std::string flag(bool b) { return b ? "true" : "false"; }

// BD / LK / GW energies for one level if all three are present.
std::string ordering_of(const Config& c, const std::vector<Solved>& by_amb) {
  std::optional<double> e[3];
  const char* names[3] = {"BD", "LK", "GW"};
  for (std::size_t k = 0; k < c.ambiguities.size(); ++k) {
    for (int j = 0; j < 3; ++j) {
      if (c.ambiguities[k].name == names[j] && by_amb[k].exists) e[j] = by_amb[k].energy;
    }
  }
  if (!e[0] || !e[1] || !e[2]) return {};
  return ordering_label(*e[0], *e[1], *e[2]);
}

void push_triple(std::vector<std::string>& row, const AmbiguitySet<double>& a) {
  row.push_back(format_number(a.alpha()));
  row.push_back(format_number(a.beta()));
  row.push_back(format_number(a.gamma()));
}

Table sweep_interpolation(const Config& c, int jobs) {
  const SweepSpec& s = *c.sweep;
  const std::vector<double> values = s.values();
  const Grid<double> grid = c.base_grid();
  const std::size_t nl = c.levels.size();
  auto energies = parallel_map(values.size() * nl, jobs, [&](std::size_t t) {
    const Level& level = c.levels[t % nl];
    const Problem<double> p = c.problem(level, AmbiguitySet<double>::bd());
    return interpolation_energies(p, s.pair, level.index(c.kind), {values[t / nl]}, grid,
                                  c.verify.reference_mass, c.convergence.bisection_tol)
        .front();
  });
  Table t{{"parameter", "value", "pair", "level", "energy"}, {}};
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = 0; j < nl; ++j) {
      t.rows.push_back({"a", format_number(values[i]), to_string(s.pair), format_level(c.levels[j], c.kind),
                        format_number(energies[i * nl + j])});
    }
  }
  return t;
}

}  // namespace

std::string format_number(double v) {
  if (v == 0) v = 0;  // drops the sign of -0
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, p);
}

std::string format_level(const Level& level, GridKind kind) {
  if (kind == GridKind::Line) return std::to_string(level.n);
  return std::to_string(level.n) + ":" + std::to_string(level.l);
}

void write_csv(std::ostream& out, const Table& t) {
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

Table cmd_solve(const Config& c, int jobs) {
  const std::size_t na = c.ambiguities.size();
  auto solved = parallel_map(c.levels.size() * na, jobs, [&](std::size_t t) {
    return solve_level(c, c.levels[t / na], c.ambiguities[t % na].set);
  });
  Table t{{"level", "alpha", "beta", "gamma", "energy", "nodes", "grid_n", "box", "converged"}, {}};
  for (std::size_t i = 0; i < solved.size(); ++i) {
    const Solved& s = solved[i];
    std::vector<std::string> row{format_level(c.levels[i / na], c.kind)};
    push_triple(row, c.ambiguities[i % na].set);
    if (s.exists) {
      row.insert(row.end(), {format_number(s.energy), std::to_string(s.nodes), std::to_string(s.grid_n),
                             format_number(s.box), flag(s.converged)});
    } else {
      row.insert(row.end(), {"", "", "", "", flag(false)});
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table cmd_sweep(const Config& c, int jobs) {
  if (!c.sweep) throw ConfigError("sweep.parameter", "missing key 'sweep.parameter'");
  if (c.sweep->parameter == "a") return sweep_interpolation(c, jobs);

  const std::vector<double> values = c.sweep->values();
  std::vector<Config> configs;
  for (double v : values) configs.push_back(with_parameter(c, c.sweep->parameter, v));
  const std::size_t na = c.ambiguities.size();
  const std::size_t nl = c.levels.size();
  auto solved = parallel_map(values.size() * nl * na, jobs, [&](std::size_t t) {
    const Config& cv = configs[t / (nl * na)];
    return solve_level(cv, cv.levels[(t / na) % nl], cv.ambiguities[t % na].set);
  });

  Table t{{"parameter", "value", "level", "alpha", "beta", "gamma", "energy", "nodes", "converged", "exact_energy",
           "exists", "ordering"},
          {}};
  const bool exact = c.exactly_solvable();
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = 0; j < nl; ++j) {
      const std::size_t base = (i * nl + j) * na;
      const std::vector<Solved> group(solved.begin() + long(base), solved.begin() + long(base + na));
      const std::string ordering = ordering_of(c, group);
      for (std::size_t k = 0; k < na; ++k) {
        const Solved& s = group[k];
        std::vector<std::string> row{c.sweep->parameter, format_number(values[i]), format_level(c.levels[j], c.kind)};
        push_triple(row, c.ambiguities[k].set);
        if (s.exists) {
          row.insert(row.end(), {format_number(s.energy), std::to_string(s.nodes), flag(s.converged)});
        } else {
          row.insert(row.end(), {"", "", ""});
        }
        row.push_back(s.exact ? format_number(*s.exact) : "");
        row.push_back(exact ? flag(s.exists) : "");
        row.push_back(ordering);
        t.rows.push_back(std::move(row));
      }
    }
  }
  return t;
}

Table cmd_coulomb_exact(const Config& c) {
  if (!c.exactly_solvable()) {
    throw ConfigError("mass.family",
                      "coulomb-exact needs problem = radial, mass.family = coulomb_deformed, potential.family = coulomb");
  }
  std::vector<double> kappas{c.mass.kappa()};
  if (c.sweep) {
    if (c.sweep->parameter != "kappa") {
      throw ConfigError("sweep.parameter", "key 'sweep.parameter': coulomb-exact sweeps kappa only");
    }
    kappas = c.sweep->values();
  }
  Table t{{"kappa", "level", "alpha", "beta", "gamma", "exact_energy", "exists"}, {}};
  for (double kappa : kappas) {
    for (const Level& level : c.levels) {
      for (const auto& a : c.ambiguities) {
        const auto lv = pdm_coulomb_level(c.potential.charge(), c.potential.coupling(), c.mass.m0(), kappa, level.n,
                                          level.l, a.set);
        std::vector<std::string> row{format_number(kappa), format_level(level, c.kind)};
        push_triple(row, a.set);
        row.push_back(lv.exists ? format_number(lv.energy) : "");
        row.push_back(flag(lv.exists));
        t.rows.push_back(std::move(row));
      }
    }
  }
  return t;
}

VerifyReport cmd_verify(const Config& c, int jobs) {
  const Scenario<double> s = c.scenario();
  // one scenario per level
  auto parts = parallel_map(c.levels.size(), jobs, [&](std::size_t i) {
    Scenario<double> one = s;
    one.levels = {c.levels[i]};
    return verify_comparison(one);
  });

  std::ostringstream out;
  const char* coord = c.kind == GridKind::Line ? "x" : "r";
  const auto& first = parts.front();
  out << "scenario: " << c.problem(c.levels.front(), AmbiguitySet<double>::bd()).describe() << "\n";
  out << "reference mass m0 = " << format_number(s.reference_mass) << "\n";
  out << "mass ordering: " << to_string(first.mass.tag) << (first.mass.equal ? " (m = m0 everywhere)" : "")
      << ", witness " << coord << " = " << format_number(first.mass.witness) << "\n";
  out << "inverse-mass laplacian: " << to_string(first.laplacian.tag)
      << (first.laplacian.zero ? " (zero everywhere)" : "") << ", witness " << coord << " = "
      << format_number(first.laplacian.witness) << "\n";
  if (s.assume_mass) out << "override: mass ordering assumed " << to_string(*s.assume_mass) << "\n";
  if (s.assume_laplacian) out << "override: laplacian assumed " << to_string(*s.assume_laplacian) << "\n";
  out << "predicted:";
  if (first.predicted.empty()) out << " NoPrediction";
  for (std::size_t i = 0; i < first.predicted.size(); ++i) out << (i ? "," : "") << " " << first.predicted[i].describe();
  out << "\n";

  bool consistent = true;
  std::optional<double> min_margin;
  for (const auto& v : parts) {
    for (const auto& obs : v.observed) {
      out << "level " << obs.level.describe(c.kind) << ":";
      for (int k = 0; k < 4; ++k) {
        out << " " << to_string(Label(k)) << "=" << (obs.energy[k] ? format_number(*obs.energy[k]) : "absent");
      }
      out << " observed " << (obs.ordering.empty() ? "n/a" : obs.ordering) << "\n";
    }
    for (const auto& chk : v.checks) {
      out << "  " << chk.relation.describe() << " margin=" << format_number(chk.margin)
          << (chk.holds ? " holds" : " VIOLATED") << "\n";
    }
    consistent = consistent && v.consistent;
    if (v.min_margin && (!min_margin || *v.min_margin < *min_margin)) min_margin = v.min_margin;
  }

  const Level hf_level = c.verify.hf.level.value_or(c.levels.front());
  for (const InterpolationPair pair : c.verify.hf.pairs) {
    for (const double a : c.verify.hf.a_values) {
      out << "hellmann-feynman " << to_string(pair) << " a=" << format_number(a) << " level "
          << hf_level.describe(c.kind) << ": ";
      try {
        const auto hf = hellmann_feynman_residual(c.problem(hf_level, AmbiguitySet<double>::bd()), pair, a,
                                                  hf_level.index(c.kind), c.verify.hf.delta, s.grid,
                                                  std::optional<double>(s.reference_mass));
        out << "lhs=" << format_number(hf.lhs) << " rhs=" << format_number(hf.rhs)
            << " residual=" << format_number(hf.residual) << "\n";
      } catch (const SolverError& e) {
        out << "not evaluated: " << e.what() << "\n";
      }
    }
  }

  out << "VERDICT consistent=" << flag(consistent) << " margins=" << (min_margin ? format_number(*min_margin) : "none")
      << "\n";
  return {out.str(), consistent};
}

int run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    Config c = load_config(opts.config_path);
    if (opts.grid_n) {
      if (*opts.grid_n < 3) throw ConfigError("grid.n", "--grid-n: need at least 3 interior points");
      c.grid_n = *opts.grid_n;
    }
    if (opts.box) {
      if (!(*opts.box > 0)) throw ConfigError("grid.box", "--box: must be positive");
      c.box = *opts.box;
    }
    if (opts.jobs < 1) throw ConfigError("", "--jobs must be at least 1");

    std::ostringstream buffer;
    int status = kOk;
    if (opts.command == "solve") {
      write_csv(buffer, cmd_solve(c, opts.jobs));
    } else if (opts.command == "sweep") {
      write_csv(buffer, cmd_sweep(c, opts.jobs));
    } else if (opts.command == "coulomb-exact") {
      write_csv(buffer, cmd_coulomb_exact(c));
    } else if (opts.command == "verify") {
      const VerifyReport r = cmd_verify(c, opts.jobs);
      buffer << r.text;
      status = r.consistent ? kOk : kInconsistent;
    } else {
      throw ConfigError("", "unknown command '" + opts.command + "'");
    }

    const std::string path = opts.out_path.empty() ? c.output : opts.out_path;
    if (path.empty() || path == "-") {
      out << buffer.str();
    } else {
      std::ofstream file(path, std::ios::binary);
      if (!file) throw ConfigError("output", "cannot write '" + path + "'");
      file << buffer.str();
    }
    return status;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  }
}

}  // namespace pdm::cli
