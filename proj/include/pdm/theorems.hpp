#pragma once

// Comparison theorems for PDM spectra.
//
// Hypotheses are classified pointwise on a grid, turned into predicted
// orderings, and checked against converged eigenvalues. The Hellmann-Feynman
// helpers differentiate an eigenvalue along the straight line between two
// Hamiltonians and compare with the expectation of their difference.

#include "pdm/analytic.hpp"
#include "pdm/convergence.hpp"
#include "pdm/core.hpp"
#include "pdm/eigensolve.hpp"
#include "pdm/hamiltonian.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pdm {

enum class MassOrderingTag { EverywhereBelowM0, EverywhereAboveM0, Mixed };
enum class LaplacianSignTag { EverywhereNegative, EverywherePositive, Indefinite };

template <typename Scalar = double>
struct MassOrdering {
  MassOrderingTag tag = MassOrderingTag::Mixed;
  Scalar witness{};
  // m == m0 at every point: both orderings hold.
  bool equal = false;
};

template <typename Scalar = double>
struct LaplacianSign {
  LaplacianSignTag tag = LaplacianSignTag::Indefinite;
  Scalar witness{};
  // identically zero on the grid
  bool zero = false;
};

inline const char* to_string(MassOrderingTag t) {
  switch (t) {
    case MassOrderingTag::EverywhereBelowM0:
      return "EverywhereBelowM0";
    case MassOrderingTag::EverywhereAboveM0:
      return "EverywhereAboveM0";
    case MassOrderingTag::Mixed:
      return "Mixed";
  }
  return "";
}

inline const char* to_string(LaplacianSignTag t) {
  switch (t) {
    case LaplacianSignTag::EverywhereNegative:
      return "EverywhereNegative";
    case LaplacianSignTag::EverywherePositive:
      return "EverywherePositive";
    case LaplacianSignTag::Indefinite:
      return "Indefinite";
  }
  return "";
}

/// Compare m(x) with m0 at every grid point (tolerance 1e-12).
/// Witness: the extreme point for a definite answer, the first offending
/// point for Mixed.
template <typename Scalar>
MassOrdering<Scalar> classify_mass_vs_constant(const MassProfile<Scalar>& mass, Scalar m0, const Grid<Scalar>& grid) {
  using std::abs;
  const Scalar tol = Scalar(1e-12);
  bool below = true, above = true;
  Scalar x_max = grid.point(0), x_min = grid.point(0), x_dev = grid.point(0);
  Scalar m_max = -std::numeric_limits<Scalar>::infinity(), m_min = std::numeric_limits<Scalar>::infinity();
  Scalar dev = Scalar(-1);
  std::optional<Scalar> first_above, first_below;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Scalar x = grid.point(i);
    const Scalar m = eval_mass(mass, x, grid.spacing()).m;
    if (m > m0 + tol) {
      below = false;
      if (!first_above) first_above = x;
    }
    if (m < m0 - tol) {
      above = false;
      if (!first_below) first_below = x;
    }
    if (m > m_max) m_max = m, x_max = x;
    if (m < m_min) m_min = m, x_min = x;
    if (abs(m - m0) > dev) dev = abs(m - m0), x_dev = x;
  }
  if (below && above) return {MassOrderingTag::EverywhereBelowM0, x_dev, true};
  if (below) return {MassOrderingTag::EverywhereBelowM0, x_max, false};
  if (above) return {MassOrderingTag::EverywhereAboveM0, x_min, false};
  // whichever violation came second decided that neither ordering holds
  return {MassOrderingTag::Mixed, std::max(*first_above, *first_below), false};
}

/// Sign of the Laplacian of 1/m at every grid point. Values within 1e-12 of
/// zero are treated as zero.
template <typename Scalar>
LaplacianSign<Scalar> classify_inverse_mass_laplacian(const MassProfile<Scalar>& mass, const Grid<Scalar>& grid,
                                                      int dimension) {
  using std::abs;
  const Scalar tol = Scalar(1e-12);
  int sign = 0;
  bool all_zero = true, has_zero = false;
  Scalar extreme_x = grid.point(0);
  Scalar extreme = std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Scalar x = grid.point(i);
    const Scalar v = inverse_mass_laplacian(mass, x, dimension, grid.spacing());
    if (abs(v) <= tol) {
      has_zero = true;
      continue;
    }
    all_zero = false;
    const int s = v > Scalar(0) ? 1 : -1;
    if (sign != 0 && s != sign) return {LaplacianSignTag::Indefinite, x, false};
    if (has_zero) return {LaplacianSignTag::Indefinite, x, false};
    sign = s;
    if (abs(v) < extreme) extreme = abs(v), extreme_x = x;
  }
  if (all_zero) return {LaplacianSignTag::Indefinite, grid.point(0), true};
  if (has_zero) return {LaplacianSignTag::Indefinite, extreme_x, false};
  return {sign > 0 ? LaplacianSignTag::EverywherePositive : LaplacianSignTag::EverywhereNegative, extreme_x, false};
}

// ---------------------------------------------------------------------------
// Predictions

enum class Label { E0, BD, LK, GW };

inline const char* to_string(Label l) {
  switch (l) {
    case Label::E0:
      return "E0";
    case Label::BD:
      return "E_BD";
    case Label::LK:
      return "E_LK";
    case Label::GW:
      return "E_GW";
  }
  return "";
}

enum class Comparison { LessEqual, GreaterEqual, Less, Greater };

inline const char* to_string(Comparison c) {
  switch (c) {
    case Comparison::LessEqual:
      return "<=";
    case Comparison::GreaterEqual:
      return ">=";
    case Comparison::Less:
      return "<";
    case Comparison::Greater:
      return ">";
  }
  return "";
}

struct Relation {
  Label lhs;
  Comparison op;
  Label rhs;

  std::string describe() const {
    return std::string(to_string(lhs)) + " " + to_string(op) + " " + to_string(rhs);
  }
  friend bool operator==(const Relation&, const Relation&) = default;
};

/// Empty means no prediction.
using Prediction = std::vector<Relation>;

inline Prediction predict_ordering(MassOrderingTag mass, LaplacianSignTag laplacian) {
  Prediction p;
  if (mass == MassOrderingTag::EverywhereBelowM0) p.push_back({Label::E0, Comparison::LessEqual, Label::BD});
  if (mass == MassOrderingTag::EverywhereAboveM0) p.push_back({Label::E0, Comparison::GreaterEqual, Label::BD});
  if (laplacian == LaplacianSignTag::EverywhereNegative) {
    p.push_back({Label::BD, Comparison::Less, Label::LK});
    p.push_back({Label::LK, Comparison::Less, Label::GW});
  }
  if (laplacian == LaplacianSignTag::EverywherePositive) {
    p.push_back({Label::BD, Comparison::Greater, Label::LK});
    p.push_back({Label::LK, Comparison::Greater, Label::GW});
  }
  return p;
}

/// Signed slack of a relation: positive when it holds strictly.
template <typename Scalar>
Scalar relation_margin(Comparison op, Scalar lhs, Scalar rhs) {
  switch (op) {
    case Comparison::LessEqual:
    case Comparison::Less:
      return rhs - lhs;
    case Comparison::GreaterEqual:
    case Comparison::Greater:
      return lhs - rhs;
  }
  return Scalar(0);
}

// ---------------------------------------------------------------------------
// Hellmann-Feynman

enum class InterpolationPair { ConstVsBD, BDvsLK, LKvsGW };

inline const char* to_string(InterpolationPair p) {
  switch (p) {
    case InterpolationPair::ConstVsBD:
      return "ConstVsBD";
    case InterpolationPair::BDvsLK:
      return "BDvsLK";
    case InterpolationPair::LKvsGW:
      return "LKvsGW";
  }
  return "";
}

/// The two problems joined by the interpolation. The ambiguity of `problem`
/// is ignored.
template <typename Scalar>
std::pair<Problem<Scalar>, Problem<Scalar>> endpoint_problems(const Problem<Scalar>& problem,
                                                              InterpolationPair pair, Scalar m0) {
  using A = AmbiguitySet<Scalar>;
  const Channel ch = problem.channel;
  switch (pair) {
    case InterpolationPair::ConstVsBD:
      return {{ch, MassProfile<Scalar>::constant(m0), problem.potential, A::bd()},
              {ch, problem.mass, problem.potential, A::bd()}};
    case InterpolationPair::BDvsLK:
      return {{ch, problem.mass, problem.potential, A::bd()}, {ch, problem.mass, problem.potential, A::lk()}};
    case InterpolationPair::LKvsGW:
      break;
  }
  return {{ch, problem.mass, problem.potential, A::lk()}, {ch, problem.mass, problem.potential, A::gw()}};
}

template <typename Scalar>
std::pair<SymmetricTridiagonal<Scalar>, SymmetricTridiagonal<Scalar>> endpoint_hamiltonians(
    const Problem<Scalar>& problem, InterpolationPair pair, const Grid<Scalar>& grid, Scalar m0) {
  auto [p0, p1] = endpoint_problems(problem, pair, m0);
  return {assemble(p0, grid), assemble(p1, grid)};
}

/// h <psi| H1 - H0 |psi>
template <typename Scalar>
Scalar expectation_of_difference(const SymmetricTridiagonal<Scalar>& h0, const SymmetricTridiagonal<Scalar>& h1,
                                 const Vector<Scalar>& psi, Scalar spacing) {
  return spacing * psi.dot(h1 * psi - h0 * psi);
}

/// (1/2) int (1/m - 1/m0) |grad psi|^2 on the grid. In the radial channel
/// psi = u/r and the angular part contributes l(l+1)/r^2.
template <typename Scalar>
Scalar kinetic_difference_integral(const Problem<Scalar>& problem, Scalar m0, const Grid<Scalar>& grid,
                                   const Vector<Scalar>& psi) {
  const Eigen::Index n = grid.size();
  const Scalar h = grid.spacing();
  const Scalar c = Scalar(1) / m0;
  Scalar sum = Scalar(0);
  for (Eigen::Index f = 0; f <= n; ++f) {
    const Scalar face = grid.lower() + (Scalar(f) + Scalar(0.5)) * h;
    const Scalar w = Scalar(1) / eval_mass(problem.mass, face, h).m;
    const Scalar right = f < n ? psi[f] : Scalar(0);
    const Scalar left = f > 0 ? psi[f - 1] : Scalar(0);
    const Scalar grad = (right - left) / h;
    sum += (w - c) * grad * grad * h;
  }
  if (problem.channel.kind == GridKind::Radial) {
    const Scalar ll = Scalar(problem.channel.l) * Scalar(problem.channel.l + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Scalar r = grid.point(i);
      const MassSample<Scalar> s = eval_mass(problem.mass, r, h);
      const Scalar w = Scalar(1) / s.m;
      const Scalar dw = -s.dm / (s.m * s.m);
      // cross term (u' - u/r)^2 after integration by parts
      sum += psi[i] * psi[i] * (dw / r + (w - c) * ll / (r * r)) * h;
    }
  }
  return sum / Scalar(2);
}

/// -(1/8) int lap(1/m) |psi|^2 on the grid.
template <typename Scalar>
Scalar laplacian_expectation_integral(const Problem<Scalar>& problem, const Grid<Scalar>& grid,
                                      const Vector<Scalar>& psi) {
  const Scalar h = grid.spacing();
  Scalar sum = Scalar(0);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    sum += inverse_mass_laplacian(problem.mass, grid.point(i), problem.channel.dimension(), h) * psi[i] * psi[i] * h;
  }
  return -sum / Scalar(8);
}

template <typename Scalar>
Scalar hellmann_feynman_integral(const Problem<Scalar>& problem, InterpolationPair pair, Scalar m0,
                                 const Grid<Scalar>& grid, const Vector<Scalar>& psi) {
  if (pair == InterpolationPair::ConstVsBD) return kinetic_difference_integral(problem, m0, grid, psi);
  return laplacian_expectation_integral(problem, grid, psi);
}

template <typename Scalar = double>
struct HellmannFeynman {
  Scalar lhs{};
  Scalar rhs{};
  Scalar residual{};
  Scalar energy{};
  int nodes = 0;
};

namespace detail {

// Level `index` of h, with a check that it is simple.
template <typename Scalar>
std::pair<Scalar, Vector<Scalar>> tracked_level(const SymmetricTridiagonal<Scalar>& h, Eigen::Index index,
                                                Scalar tol, Scalar spacing, Scalar a) {
  using std::abs;
  const Scalar e = eigenvalue_by_index(h, index, tol);
  const Scalar gap = Scalar(1e-9) * std::max(Scalar(1), abs(e));
  if (sturm_count(h, e - gap) != index || sturm_count(h, e + gap) != index + 1) {
    throw SolverError("hellmann-feynman: level " + std::to_string(index) + " is degenerate at a = " +
                      detail::num(double(a)));
  }
  Vector<Scalar> v = inverse_iteration(h, e, tol);
  detail::normalize_state(v, spacing);
  return {e, std::move(v)};
}

}  // namespace detail

/// Central difference of E(a) against the expectation of dH/da at a.
/// `level` is the index within the channel (node count).
template <typename Scalar>
HellmannFeynman<Scalar> hellmann_feynman_residual(const Problem<Scalar>& problem, InterpolationPair pair, Scalar a,
                                                  int level, Scalar delta, const Grid<Scalar>& grid,
                                                  std::optional<Scalar> reference_mass = std::nullopt,
                                                  Scalar tol = Scalar(16) * std::numeric_limits<Scalar>::epsilon()) {
  using std::abs;
  if (!(a > Scalar(0) && a < Scalar(1))) throw std::invalid_argument("hellmann-feynman: a must lie in (0, 1)");
  if (!(delta > Scalar(0)) || a - delta < Scalar(0) || a + delta > Scalar(1)) {
    throw std::invalid_argument("hellmann-feynman: need delta > 0 and a +/- delta inside [0, 1]");
  }
  if (level < 0 || level >= grid.size()) throw std::invalid_argument("hellmann-feynman: level out of range");
  const Scalar m0 = reference_mass.value_or(problem.mass.m0());
  const auto [h0, h1] = endpoint_hamiltonians(problem, pair, grid, m0);
  const Scalar h = grid.spacing();

  // eigenvalues to ~round-off; the difference quotient divides by 2 delta
  const Scalar etol = tol * std::max(Scalar(1), h0.norm_inf());
  const auto [e_minus, v_minus] = detail::tracked_level(interpolate(h0, h1, a - delta), level, etol, h, a - delta);
  const auto [e_mid, v_mid] = detail::tracked_level(interpolate(h0, h1, a), level, etol, h, a);
  const auto [e_plus, v_plus] = detail::tracked_level(interpolate(h0, h1, a + delta), level, etol, h, a + delta);
  const int nodes = count_nodes(v_mid);
  if (count_nodes(v_minus) != nodes || count_nodes(v_plus) != nodes) {
    throw SolverError("hellmann-feynman: node count changes inside the window around a = " +
                      detail::num(double(a)));
  }

  HellmannFeynman<Scalar> out;
  out.lhs = (e_plus - e_minus) / (Scalar(2) * delta);
  out.rhs = hellmann_feynman_integral(problem, pair, m0, grid, v_mid);
  out.residual = abs(out.lhs - out.rhs);
  out.energy = e_mid;
  out.nodes = nodes;
  return out;
}

/// E(a) of the interpolated Hamiltonian at each a.
template <typename Scalar>
std::vector<Scalar> interpolation_energies(const Problem<Scalar>& problem, InterpolationPair pair, int level,
                                           const std::vector<Scalar>& a_values, const Grid<Scalar>& grid,
                                           std::optional<Scalar> reference_mass = std::nullopt,
                                           Scalar tol = Scalar(1e-13)) {
  const Scalar m0 = reference_mass.value_or(problem.mass.m0());
  const auto [h0, h1] = endpoint_hamiltonians(problem, pair, grid, m0);
  std::vector<Scalar> out;
  out.reserve(a_values.size());
  for (const Scalar a : a_values) out.push_back(eigenvalue_by_index(interpolate(h0, h1, a), level, tol));
  return out;
}

// ---------------------------------------------------------------------------
// Scenarios

/// A bound state addressed by quantum numbers. Line: n is the node count.
/// Radial: principal n >= l + 1, node count n - l - 1.
struct Level {
  int n = 0;
  int l = 0;

  int index(GridKind kind) const { return kind == GridKind::Line ? n : n - l - 1; }
  std::string describe(GridKind kind) const {
    if (kind == GridKind::Line) return "n=" + std::to_string(n);
    return "n=" + std::to_string(n) + ",l=" + std::to_string(l);
  }
  friend bool operator==(const Level&, const Level&) = default;
};

template <typename Scalar = double>
struct Scenario {
  GridKind kind = GridKind::Line;
  MassProfile<Scalar> mass;
  PotentialProfile<Scalar> potential;
  Scalar reference_mass = Scalar(1);
  std::vector<Level> levels;
  Grid<Scalar> grid;
  ConvergenceOptions<Scalar> convergence{};
  std::optional<MassOrderingTag> assume_mass;
  std::optional<LaplacianSignTag> assume_laplacian;
};

template <typename Scalar = double>
struct LevelObservation {
  Level level;
  // indexed by Label; empty when the level does not exist
  std::array<std::optional<Scalar>, 4> energy;
  std::string ordering;
};

template <typename Scalar = double>
struct RelationCheck {
  Level level;
  Relation relation;
  Scalar margin{};
  bool holds = false;
};

template <typename Scalar = double>
struct ComparisonVerdict {
  MassOrdering<Scalar> mass;
  LaplacianSign<Scalar> laplacian;
  Prediction predicted;
  std::vector<LevelObservation<Scalar>> observed;
  std::vector<RelationCheck<Scalar>> checks;
  bool consistent = true;
  // smallest margin over all checks; nullopt when nothing was predicted
  std::optional<Scalar> min_margin;
};

/// "BD<LK<GW" style summary; neighbours within `tol` print as '='.
template <typename Scalar>
std::string ordering_label(Scalar bd, Scalar lk, Scalar gw, Scalar tol = Scalar(1e-10)) {
  auto cmp = [tol](Scalar x, Scalar y) {
    using std::abs;
    if (abs(x - y) <= tol * std::max(Scalar(1), abs(x))) return '=';
    return x < y ? '<' : '>';
  };
  return std::string("BD") + cmp(bd, lk) + "LK" + cmp(lk, gw) + "GW";
}

namespace detail {

template <typename Scalar>
bool level_exists(const Scenario<Scalar>& s, const Level& level, const AmbiguitySet<Scalar>& amb) {
  if (s.kind != GridKind::Radial) return true;
  if (s.mass.family() != MassProfile<Scalar>::Family::CoulombDeformed) return true;
  if (s.potential.family() != PotentialProfile<Scalar>::Family::Coulomb) return true;
  return pdm_coulomb_level(s.potential.charge(), s.potential.coupling(), s.mass.m0(), s.mass.kappa(), level.n,
                           level.l, amb)
      .exists;
}

}  // namespace detail

template <typename Scalar>
ComparisonVerdict<Scalar> verify_comparison(const Scenario<Scalar>& s) {
  if (s.levels.empty()) throw std::invalid_argument("verify: no levels requested");
  const int dim = s.kind == GridKind::Line ? 1 : 3;
  ComparisonVerdict<Scalar> v;
  v.mass = classify_mass_vs_constant(s.mass, s.reference_mass, s.grid);
  v.laplacian = classify_inverse_mass_laplacian(s.mass, s.grid, dim);
  v.predicted = predict_ordering(s.assume_mass.value_or(v.mass.tag), s.assume_laplacian.value_or(v.laplacian.tag));

  using A = AmbiguitySet<Scalar>;
  const std::array<A, 4> amb = {A::bd(), A::bd(), A::lk(), A::gw()};
  for (const Level& level : s.levels) {
    const Channel ch = s.kind == GridKind::Line ? Channel::line() : Channel::radial(level.l);
    if (level.index(s.kind) < 0) throw std::invalid_argument("verify: invalid level " + level.describe(s.kind));
    LevelObservation<Scalar> obs{level, {}, {}};
    for (int k = 0; k < 4; ++k) {
      const bool constant = k == int(Label::E0);
      if (!constant && !detail::level_exists(s, level, amb[k])) continue;
      const Problem<Scalar> p{ch, constant ? MassProfile<Scalar>::constant(s.reference_mass) : s.mass, s.potential,
                              amb[k]};
      try {
        obs.energy[k] = converged_energy(p, s.grid, level.index(s.kind), s.convergence).energy;
      } catch (const SolverError& e) {
        throw SolverError("verify: " + std::string(to_string(Label(k))) + " " + level.describe(s.kind) + ": " +
                          e.what());
      }
    }
    const auto& E = obs.energy;
    if (E[1] && E[2] && E[3]) obs.ordering = ordering_label(*E[1], *E[2], *E[3]);
    for (const Relation& r : v.predicted) {
      const auto& x = E[int(r.lhs)];
      const auto& y = E[int(r.rhs)];
      if (!x || !y) continue;
      RelationCheck<Scalar> c{level, r, relation_margin(r.op, *x, *y), false};
      c.holds = c.margin > Scalar(-1e-8);
      v.consistent = v.consistent && c.holds;
      if (!v.min_margin || c.margin < *v.min_margin) v.min_margin = c.margin;
      v.checks.push_back(c);
    }
    v.observed.push_back(std::move(obs));
  }
  return v;
}

}  // namespace pdm
