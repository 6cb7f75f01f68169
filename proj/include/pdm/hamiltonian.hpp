#pragma once

// Discrete von Roos Hamiltonian.
//
// Any ordering (alpha, beta, gamma) is written as the BenDaniel-Duke kinetic
// term -1/2 d (1/m) d plus a multiplicative correction U(x). The kinetic part
// is discretized in flux form with 1/m sampled at half-grid points, so the
// assembled matrix is symmetric by construction.

#include "pdm/core.hpp"

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>

namespace pdm {

/// Line problem, or the radial channel with orbital quantum number l acting
/// on u(r) = r psi(r).
struct Channel {
  GridKind kind = GridKind::Line;
  int l = 0;

  static Channel line() { return {GridKind::Line, 0}; }
  static Channel radial(int l) {
    if (l < 0) throw std::invalid_argument("channel: l must be non-negative");
    return {GridKind::Radial, l};
  }
  int dimension() const { return kind == GridKind::Line ? 1 : 3; }
};

template <typename Scalar = double>
struct Problem {
  Channel channel;
  MassProfile<Scalar> mass;
  PotentialProfile<Scalar> potential;
  AmbiguitySet<Scalar> ambiguity;

  std::string describe() const {
    std::string s = channel.kind == GridKind::Line ? "line" : "radial l=" + std::to_string(channel.l);
    s += " mass=" + mass.describe() + " potential=" + potential.describe();
    s += " ambiguity=(" + detail::num(double(ambiguity.alpha())) + "," +
         detail::num(double(ambiguity.beta())) + "," + detail::num(double(ambiguity.gamma())) + ")";
    return s;
  }
};

template <typename To, typename From>
Problem<To> problem_cast(const Problem<From>& p) {
  return {p.channel, profile_cast<To>(p.mass), profile_cast<To>(p.potential), ambiguity_cast<To>(p.ambiguity)};
}

template <typename Scalar = double>
class SymmetricTridiagonal {
 public:
  using VectorType = Vector<Scalar>;

  SymmetricTridiagonal(VectorType diag, VectorType offdiag)
      : diag_(std::move(diag)), off_(std::move(offdiag)) {
    if (diag_.size() < 1 || off_.size() != diag_.size() - 1) {
      throw std::invalid_argument("tridiagonal: off-diagonal must have n-1 entries");
    }
    if (!diag_.allFinite() || !off_.allFinite()) {
      throw std::invalid_argument("tridiagonal: non-finite entry");
    }
  }

  Eigen::Index size() const { return diag_.size(); }
  const VectorType& diagonal() const { return diag_; }
  const VectorType& offdiagonal() const { return off_; }

  VectorType operator*(const VectorType& v) const {
    const Eigen::Index n = size();
    VectorType out = diag_.cwiseProduct(v);
    if (n > 1) {
      out.head(n - 1) += off_.cwiseProduct(v.tail(n - 1));
      out.tail(n - 1) += off_.cwiseProduct(v.head(n - 1));
    }
    return out;
  }

  /// max row sum of absolute values
  Scalar norm_inf() const {
    const Eigen::Index n = size();
    VectorType rows = diag_.cwiseAbs();
    if (n > 1) {
      rows.head(n - 1) += off_.cwiseAbs();
      rows.tail(n - 1) += off_.cwiseAbs();
    }
    return rows.maxCoeff();
  }

  Scalar rayleigh_quotient(const VectorType& v) const { return v.dot(*this * v) / v.squaredNorm(); }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> to_dense() const {
    const Eigen::Index n = size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    m.diagonal() = diag_;
    if (n > 1) {
      m.diagonal(1) = off_;
      m.diagonal(-1) = off_;
    }
    return m;
  }

 private:
  VectorType diag_;
  VectorType off_;
};

/// Multiplicative correction U with H(alpha,beta,gamma) = H_BD + U on a line.
template <typename Scalar>
Scalar effective_ambiguity_potential(const MassSample<Scalar>& s, const AmbiguitySet<Scalar>& amb) {
  const Scalar a = amb.alpha(), b = amb.beta(), g = amb.gamma();
  const Scalar grad_coeff = a * (a + b - Scalar(1)) + g * (g + b - Scalar(1));
  const Scalar m2 = s.m * s.m;
  return -(grad_coeff * s.dm * s.dm / (m2 * s.m) + (a + g) * s.d2m / m2) / Scalar(4);
}

/// Same correction for a spherically symmetric mass in three dimensions:
/// m'' is replaced by the radial Laplacian m'' + 2 m'/r.
template <typename Scalar>
Scalar effective_ambiguity_potential_radial(const MassSample<Scalar>& s, const AmbiguitySet<Scalar>& amb,
                                            Scalar r) {
  if (!(r > Scalar(0))) throw std::domain_error("effective potential: radial evaluation needs r > 0");
  MassSample<Scalar> lap = s;
  lap.d2m = s.d2m + Scalar(2) * s.dm / r;
  return effective_ambiguity_potential(lap, amb);
}

/// Flux weights 1/m at the n+1 half-grid points (boundary faces included)
/// and the multiplicative part of the diagonal at the n interior points.
template <typename Scalar = double>
struct DiscreteOperator {
  Grid<Scalar> grid;
  Vector<Scalar> flux_weights;
  Vector<Scalar> potential;

  SymmetricTridiagonal<Scalar> matrix() const {
    const Eigen::Index n = grid.size();
    const Scalar scale = Scalar(1) / (Scalar(2) * grid.spacing() * grid.spacing());
    Vector<Scalar> diag = (flux_weights.head(n) + flux_weights.tail(n)) * scale + potential;
    Vector<Scalar> off = -flux_weights.segment(1, n - 1) * scale;
    return {std::move(diag), std::move(off)};
  }
};

template <typename Scalar>
DiscreteOperator<Scalar> discretize(const Problem<Scalar>& problem, const Grid<Scalar>& grid) {
  if (grid.kind() != problem.channel.kind) {
    throw std::invalid_argument("assemble: grid kind does not match the channel");
  }
  const Eigen::Index n = grid.size();
  const Scalar h = grid.spacing();
  const bool radial = grid.kind() == GridKind::Radial;
  const Scalar ll = Scalar(problem.channel.l) * Scalar(problem.channel.l + 1);

  DiscreteOperator<Scalar> op{grid, Vector<Scalar>(n + 1), Vector<Scalar>(n)};
  for (Eigen::Index i = 0; i <= n; ++i) {
    const Scalar face = grid.lower() + (Scalar(i) + Scalar(0.5)) * h;
    op.flux_weights[i] = Scalar(1) / eval_mass(problem.mass, face, h).m;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar x = grid.point(i);
    const MassSample<Scalar> s = eval_mass(problem.mass, x, h);
    Scalar p = problem.potential(x);
    if (radial) {
      // u = r psi: centrifugal term plus (1/2r) d(1/m)/dr from the first-derivative part
      p += effective_ambiguity_potential_radial(s, problem.ambiguity, x);
      p += ll / (Scalar(2) * s.m * x * x);
      p += -s.dm / (s.m * s.m) / (Scalar(2) * x);
    } else {
      p += effective_ambiguity_potential(s, problem.ambiguity);
    }
    op.potential[i] = p;
  }
  return op;
}

template <typename Scalar>
SymmetricTridiagonal<Scalar> assemble(const Problem<Scalar>& problem, const Grid<Scalar>& grid) {
  return discretize(problem, grid).matrix();
}

template <typename Scalar>
SymmetricTridiagonal<Scalar> assemble_line_hamiltonian(const Grid<Scalar>& grid, const MassProfile<Scalar>& mass,
                                                       const PotentialProfile<Scalar>& potential,
                                                       const AmbiguitySet<Scalar>& ambiguity) {
  if (grid.kind() != GridKind::Line) throw std::invalid_argument("assemble: line Hamiltonian needs a line grid");
  return assemble(Problem<Scalar>{Channel::line(), mass, potential, ambiguity}, grid);
}

template <typename Scalar>
SymmetricTridiagonal<Scalar> assemble_radial_hamiltonian(const Grid<Scalar>& grid, const MassProfile<Scalar>& mass,
                                                         const PotentialProfile<Scalar>& potential, int l,
                                                         const AmbiguitySet<Scalar>& ambiguity) {
  if (grid.kind() != GridKind::Radial) {
    throw std::invalid_argument("assemble: radial Hamiltonian needs a radial grid");
  }
  return assemble(Problem<Scalar>{Channel::radial(l), mass, potential, ambiguity}, grid);
}

/// (1 - a) h0 + a h1
template <typename Scalar>
SymmetricTridiagonal<Scalar> interpolate(const SymmetricTridiagonal<Scalar>& h0,
                                         const SymmetricTridiagonal<Scalar>& h1, Scalar a) {
  if (h0.size() != h1.size()) throw std::invalid_argument("interpolate: dimension mismatch");
  if (!(a >= Scalar(0) && a <= Scalar(1))) throw std::invalid_argument("interpolate: a must lie in [0, 1]");
  if (a == Scalar(0)) return h0;
  if (a == Scalar(1)) return h1;
  return {(Scalar(1) - a) * h0.diagonal() + a * h1.diagonal(),
          (Scalar(1) - a) * h0.offdiagonal() + a * h1.offdiagonal()};
}

}  // namespace pdm
