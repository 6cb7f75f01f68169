#pragma once

// Continuum estimates of a tracked level from finite-box, finite-grid solves.
//
// On each box the level is computed at spacing h and h/2 and combined by
// Richardson extrapolation (the flux scheme is second order). The box is then
// doubled at fixed spacing. The box sequence is accelerated with repeated
// Aitken delta-squared passes and the column whose last two entries agree
// best is reported.

#include "pdm/core.hpp"
#include "pdm/eigensolve.hpp"
#include "pdm/hamiltonian.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace pdm {

template <typename Scalar = double>
struct ConvergenceOptions {
  Scalar rel_tol = Scalar(1e-6);
  int min_boxes = 2;
  int max_box_doublings = 6;
  Scalar bisection_tol = Scalar(1e-13);
  bool extrapolate_grid = true;
};

template <typename Scalar = double>
struct ConvergedEnergy {
  Scalar energy{};
  Scalar error_estimate{};
  bool converged = false;
  Grid<Scalar> final_grid;
  std::vector<Scalar> box_sequence;
};

/// Level `index` of `problem` on a single grid.
template <typename Scalar>
Scalar grid_energy(const Problem<Scalar>& problem, const Grid<Scalar>& grid, Eigen::Index index, Scalar tol) {
  return eigenvalue_by_index(assemble(problem, grid), index, tol);
}

/// Richardson combination of spacing h and h/2 on the same box.
template <typename Scalar>
Scalar richardson_energy(const Problem<Scalar>& problem, const Grid<Scalar>& grid, Eigen::Index index,
                         Scalar tol) {
  const Scalar coarse = grid_energy(problem, grid, index, tol);
  const Scalar fine = grid_energy(problem, grid.refined(), index, tol);
  return (Scalar(4) * fine - coarse) / Scalar(3);
}

namespace detail {

template <typename Scalar>
std::vector<Scalar> aitken(const std::vector<Scalar>& s) {
  using std::abs;
  std::vector<Scalar> out;
  for (std::size_t j = 2; j < s.size(); ++j) {
    const Scalar d1 = s[j] - s[j - 1];
    const Scalar d0 = s[j - 1] - s[j - 2];
    const Scalar den = d1 - d0;
    const Scalar noise = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * (abs(s[j]) + Scalar(1));
    out.push_back(abs(den) <= noise ? s[j] : s[j] - d1 * d1 / den);
  }
  return out;
}

}  // namespace detail

template <typename Scalar>
ConvergedEnergy<Scalar> converged_energy(const Problem<Scalar>& problem, const Grid<Scalar>& base,
                                         Eigen::Index index, const ConvergenceOptions<Scalar>& opts = {}) {
  using std::abs;
  ConvergedEnergy<Scalar> out{Scalar(0), Scalar(0), false, base, {}};
  Grid<Scalar> grid = base;
  for (int j = 0; j <= opts.max_box_doublings; ++j) {
    if (j > 0) grid = grid.doubled_box();
    out.box_sequence.push_back(opts.extrapolate_grid ? richardson_energy(problem, grid, index, opts.bisection_tol)
                                                     : grid_energy(problem, grid, index, opts.bisection_tol));
    out.final_grid = grid;

    // Candidate estimates: raw box sequence, then successive Aitken passes.
    std::optional<Scalar> best;
    Scalar best_delta = std::numeric_limits<Scalar>::infinity();
    std::vector<Scalar> column = out.box_sequence;
    while (column.size() >= 2) {
      const Scalar delta = abs(column.back() - column[column.size() - 2]);
      if (delta < best_delta) {
        best_delta = delta;
        best = column.back();
      }
      column = detail::aitken(column);
    }
    if (!best) {
      out.energy = out.box_sequence.back();
      out.error_estimate = std::numeric_limits<Scalar>::infinity();
      continue;
    }
    out.energy = *best;
    out.error_estimate = best_delta;
    const Scalar scale = std::max(abs(*best), Scalar(1e-12));
    if (static_cast<int>(out.box_sequence.size()) >= opts.min_boxes && best_delta <= opts.rel_tol * scale) {
      out.converged = true;
      return out;
    }
  }
  return out;
}

}  // namespace pdm
