#pragma once

// Bound states of an assembled Hamiltonian.
//
// Eigenvalues come from bisection on Sturm counts, eigenvectors from inverse
// iteration. `shoot` reaches the same discrete spectrum by a different road:
// it integrates the three-term recurrence from both ends and bisects on the
// matching condition at a classical turning point.

#include "pdm/core.hpp"
#include "pdm/hamiltonian.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace pdm {

template <typename Scalar = double>
struct BoundState {
  Scalar energy{};
  Vector<Scalar> samples;
  int nodes = 0;
  Scalar norm{};
};

template <typename Scalar = double>
struct Spectrum {
  std::vector<BoundState<Scalar>> states;
  std::string fingerprint;
  Scalar spacing = Scalar(1);
};

/// Interior sign changes. Samples below 1e-8 of the peak are skipped.
template <typename Scalar>
int count_nodes(const Vector<Scalar>& v) {
  using std::abs;
  if (v.size() == 0) return 0;
  const Scalar floor = Scalar(1e-8) * v.cwiseAbs().maxCoeff();
  int nodes = 0;
  int last = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (abs(v[i]) <= floor) continue;
    const int s = v[i] > Scalar(0) ? 1 : -1;
    if (last != 0 && s != last) ++nodes;
    last = s;
  }
  return nodes;
}

/// Number of eigenvalues strictly below e, from the signs of the LDL^T pivots
/// of h - e I. Pivots smaller than pivmin are pushed away from zero keeping
/// their sign (an exact zero counts as positive).
template <typename Scalar>
Eigen::Index sturm_count(const SymmetricTridiagonal<Scalar>& h, Scalar e) {
  using std::abs;
  const auto& d = h.diagonal();
  const auto& o = h.offdiagonal();
  const Eigen::Index n = h.size();
  Scalar max_off2 = Scalar(1);
  if (n > 1) max_off2 = std::max(max_off2, o.cwiseAbs2().maxCoeff());
  const Scalar pivmin = std::numeric_limits<Scalar>::min() * max_off2;

  auto guard = [pivmin](Scalar q) {
    if (abs(q) < pivmin) return q < Scalar(0) ? -pivmin : pivmin;
    return q;
  };
  Scalar q = guard(d[0] - e);
  Eigen::Index count = q < Scalar(0) ? 1 : 0;
  for (Eigen::Index i = 1; i < n; ++i) {
    q = guard(d[i] - e - o[i - 1] * o[i - 1] / q);
    if (q < Scalar(0)) ++count;
  }
  return count;
}

template <typename Scalar>
std::pair<Scalar, Scalar> gershgorin_bounds(const SymmetricTridiagonal<Scalar>& h) {
  const Eigen::Index n = h.size();
  Vector<Scalar> radius = Vector<Scalar>::Zero(n);
  if (n > 1) {
    radius.head(n - 1) += h.offdiagonal().cwiseAbs();
    radius.tail(n - 1) += h.offdiagonal().cwiseAbs();
  }
  const Scalar lo = (h.diagonal() - radius).minCoeff();
  const Scalar hi = (h.diagonal() + radius).maxCoeff();
  const Scalar pad = Scalar(4) * std::numeric_limits<Scalar>::epsilon() * std::max(h.norm_inf(), Scalar(1));
  return {lo - pad, hi + pad};
}

/// The index-th eigenvalue (0-based, ascending) bisected to width tol. A
/// bracket is used only if its Sturm counts confirm it.
template <typename Scalar>
Scalar eigenvalue_by_index(const SymmetricTridiagonal<Scalar>& h, Eigen::Index index, Scalar tol,
                           std::optional<std::pair<Scalar, Scalar>> bracket = std::nullopt) {
  if (index < 0 || index >= h.size()) throw std::invalid_argument("eigenvalue: index out of range");
  if (!(tol > Scalar(0))) throw std::invalid_argument("eigenvalue: tol must be positive");
  auto [lo, hi] = gershgorin_bounds(h);
  if (bracket && sturm_count(h, bracket->first) <= index && sturm_count(h, bracket->second) > index) {
    lo = bracket->first;
    hi = bracket->second;
  }
  while (hi - lo > tol) {
    const Scalar mid = lo + (hi - lo) / Scalar(2);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(h, mid) > index) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo + (hi - lo) / Scalar(2);
}

namespace detail {

// LU factorization of a tridiagonal matrix with partial pivoting, the same
// scheme as LAPACK's gttrf/gtts2. Zero pivots are replaced by `tiny`.
template <typename Scalar>
class TridiagonalLU {
 public:
  TridiagonalLU(const SymmetricTridiagonal<Scalar>& h, Scalar shift, Scalar tiny)
      : n_(h.size()),
        d_(h.diagonal().array() - shift),
        dl_(h.offdiagonal()),
        du_(h.offdiagonal()),
        du2_(Vector<Scalar>::Zero(std::max<Eigen::Index>(n_ - 2, 0))),
        swapped_(static_cast<std::size_t>(std::max<Eigen::Index>(n_ - 1, 0)), false) {
    using std::abs;
    for (Eigen::Index i = 0; i + 1 < n_; ++i) {
      if (abs(d_[i]) >= abs(dl_[i])) {
        if (d_[i] == Scalar(0)) d_[i] = tiny;
        const Scalar fact = dl_[i] / d_[i];
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
      } else {
        const Scalar fact = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = fact;
        const Scalar temp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = temp - fact * d_[i + 1];
        if (i + 2 < n_) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -fact * du_[i + 1];
        }
        swapped_[static_cast<std::size_t>(i)] = true;
      }
    }
    for (Eigen::Index i = 0; i < n_; ++i) {
      if (abs(d_[i]) < tiny) d_[i] = d_[i] < Scalar(0) ? -tiny : tiny;
    }
  }

  Vector<Scalar> solve(Vector<Scalar> b) const {
    for (Eigen::Index i = 0; i + 1 < n_; ++i) {
      if (!swapped_[static_cast<std::size_t>(i)]) {
        b[i + 1] -= dl_[i] * b[i];
      } else {
        const Scalar temp = b[i] - dl_[i] * b[i + 1];
        b[i] = b[i + 1];
        b[i + 1] = temp;
      }
    }
    b[n_ - 1] /= d_[n_ - 1];
    if (n_ > 1) b[n_ - 2] = (b[n_ - 2] - du_[n_ - 2] * b[n_ - 1]) / d_[n_ - 2];
    for (Eigen::Index i = n_ - 3; i >= 0; --i) {
      b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
    }
    return b;
  }

 private:
  Eigen::Index n_;
  Vector<Scalar> d_, dl_, du_, du2_;
  std::vector<bool> swapped_;
};

// Scale to unit discrete L2 norm (h * sum v^2 = 1) with the first significant
// sample positive.
template <typename Scalar>
void normalize_state(Vector<Scalar>& v, Scalar spacing) {
  using std::abs;
  using std::sqrt;
  v /= sqrt(spacing * v.squaredNorm());
  const Scalar floor = Scalar(1e-8) * v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (abs(v[i]) > floor) {
      if (v[i] < Scalar(0)) v = -v;
      break;
    }
  }
}

}  // namespace detail

/// Eigenvector for an eigenvalue already bracketed to width tol. `against`
/// holds unit vectors of a (near-)degenerate cluster to stay orthogonal to.
template <typename Scalar>
Vector<Scalar> inverse_iteration(const SymmetricTridiagonal<Scalar>& h, Scalar eigenvalue, Scalar tol,
                                 const std::vector<Vector<Scalar>>& against = {}, unsigned seed = 0,
                                 int max_iterations = 50) {
  using std::sqrt;
  const Eigen::Index n = h.size();
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar norm = std::max(h.norm_inf(), Scalar(1));
  const detail::TridiagonalLU<Scalar> lu(h, eigenvalue, eps * norm);
  const Scalar threshold = Scalar(2) * tol + Scalar(64) * eps * norm;

  std::mt19937 rng(1234u + seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Vector<Scalar> v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = Scalar(uniform(rng));
  v.normalize();

  for (int it = 0; it < max_iterations; ++it) {
    Vector<Scalar> x = lu.solve(v);
    for (const auto& u : against) x -= u.dot(x) * u;
    const Scalar xn = x.norm();
    if (!(xn > Scalar(0))) break;
    v = x / xn;
    const Scalar residual = (h * v - eigenvalue * v).norm();
    if (it >= 1 && residual <= threshold) return v;
  }
  throw SolverError("inverse iteration did not converge");
}

/// The k lowest eigenpairs of h. States are normalized with the discrete
/// weight `spacing`.
template <typename Scalar>
Spectrum<Scalar> lowest_eigenpairs(const SymmetricTridiagonal<Scalar>& h, int k, Scalar tol,
                                   Scalar spacing = Scalar(1)) {
  using std::abs;
  if (k < 1) throw std::invalid_argument("lowest_eigenpairs: k must be at least 1");
  if (k > h.size()) throw std::invalid_argument("lowest_eigenpairs: k exceeds the matrix dimension");
  if (!(tol > Scalar(0))) throw std::invalid_argument("lowest_eigenpairs: tol must be positive");

  Spectrum<Scalar> spectrum;
  spectrum.spacing = spacing;
  std::vector<Vector<Scalar>> unit;
  std::vector<Scalar> energies;
  for (int j = 0; j < k; ++j) {
    const Scalar e = eigenvalue_by_index(h, j, tol);
    std::vector<Vector<Scalar>> cluster;
    for (int i = j - 1; i >= 0; --i) {
      if (abs(e - energies[static_cast<std::size_t>(i)]) >= Scalar(1e-9) * std::max(Scalar(1), abs(e))) break;
      cluster.push_back(unit[static_cast<std::size_t>(i)]);
    }
    Vector<Scalar> v;
    try {
      v = inverse_iteration(h, e, tol, cluster, static_cast<unsigned>(j));
    } catch (const SolverError&) {
      throw SolverError("inverse iteration did not converge for eigenpair index " + std::to_string(j));
    }
    unit.push_back(v);
    energies.push_back(e);

    BoundState<Scalar> state;
    state.energy = e;
    state.samples = v;
    detail::normalize_state(state.samples, spacing);
    state.nodes = count_nodes(state.samples);
    state.norm = std::sqrt(spacing * state.samples.squaredNorm());
    spectrum.states.push_back(std::move(state));
  }
  return spectrum;
}

template <typename Scalar>
Spectrum<Scalar> solve(const Problem<Scalar>& problem, const Grid<Scalar>& grid, int k, Scalar tol) {
  Spectrum<Scalar> s = lowest_eigenpairs(assemble(problem, grid), k, tol, grid.spacing());
  s.fingerprint = problem.describe() + " grid=[" + detail::num(double(grid.lower())) + "," +
                  detail::num(double(grid.upper())) + "] n=" + std::to_string(grid.size());
  return s;
}

namespace detail {

// The discrete eigenproblem written as a three-term recurrence
//   c[i-1] u[i-1] + (d[i] - E) u[i] + c[i] u[i+1] = 0,  i = 0..n-1,
// with couplings c[-1], c[n-1] through the boundary faces and u[-1] = u[n] = 0.
template <typename Scalar>
class Recurrence {
 public:
  explicit Recurrence(const DiscreteOperator<Scalar>& op)
      : n_(op.grid.size()), potential_(op.potential) {
    const Scalar scale = Scalar(1) / (Scalar(2) * op.grid.spacing() * op.grid.spacing());
    coupling_ = -op.flux_weights * scale;  // index i+1 couples points i and i+1
    diag_ = (op.flux_weights.head(n_) + op.flux_weights.tail(n_)) * scale + op.potential;
    if ((coupling_.array() >= Scalar(0)).any()) {
      throw std::invalid_argument("shoot: flux weights must be positive");
    }
  }

  Eigen::Index size() const { return n_; }
  const Vector<Scalar>& potential() const { return potential_; }

  // coupling between points i and i+1, i = -1..n-1
  Scalar c(Eigen::Index i) const { return coupling_[i + 1]; }

  /// Sign changes of the outward solution, including the virtual value past
  /// the right boundary. Equals the number of eigenvalues below e.
  int outward_nodes(Scalar e) const {
    using std::abs;
    Scalar prev = Scalar(0), cur = Scalar(1);
    int nodes = 0;
    for (Eigen::Index i = 0; i < n_; ++i) {
      Scalar next = ((e - diag_[i]) * cur - (i > 0 ? c(i - 1) * prev : Scalar(0))) / c(i);
      if ((next < Scalar(0)) != (cur < Scalar(0))) ++nodes;
      prev = cur;
      cur = next;
      const Scalar mag = abs(cur) + abs(prev);
      if (mag > kRescale) {
        prev /= mag;
        cur /= mag;
      }
    }
    return nodes;
  }

  /// Outward values u[0..last+1], rescaled in place when they grow large.
  Vector<Scalar> outward(Scalar e, Eigen::Index last) const {
    using std::abs;
    Vector<Scalar> u(last + 2);
    u[0] = Scalar(1);
    for (Eigen::Index i = 0; i <= last; ++i) {
      const Scalar back = i > 0 ? c(i - 1) * u[i - 1] : Scalar(0);
      u[i + 1] = ((e - diag_[i]) * u[i] - back) / c(i);
      if (abs(u[i + 1]) > kRescale) u.head(i + 2) /= abs(u[i + 1]);
    }
    return u;
  }

  /// Inward values v[first-1..n-1] (stored from offset first-1).
  Vector<Scalar> inward(Scalar e, Eigen::Index first) const {
    using std::abs;
    const Eigen::Index off = first - 1;
    Vector<Scalar> v(n_ - off);
    v[n_ - 1 - off] = Scalar(1);
    for (Eigen::Index i = n_ - 1; i >= first; --i) {
      const Scalar ahead = i + 1 < n_ ? c(i) * v[i + 1 - off] : Scalar(0);
      v[i - 1 - off] = ((e - diag_[i]) * v[i - off] - ahead) / c(i - 1);
      if (abs(v[i - 1 - off]) > kRescale) v.tail(n_ - i + 1) /= abs(v[i - 1 - off]);
    }
    return v;
  }

  /// Discrete Wronskian of the outward and inward solutions at the face
  /// (m, m+1), scaled by their magnitudes there: the matching discriminant.
  Scalar mismatch(Scalar e, Eigen::Index m) const {
    using std::abs;
    const Vector<Scalar> u = outward(e, m);
    const Vector<Scalar> v = inward(e, m + 1);
    const Scalar um = u[m], up = u[m + 1];
    const Scalar vm = v[0], vp = v[1];
    return c(m) * (um * vp - up * vm) / ((abs(um) + abs(up)) * (abs(vm) + abs(vp)));
  }

 private:
  static constexpr double kRescale = 1e100;
  Eigen::Index n_;
  Vector<Scalar> potential_;
  Vector<Scalar> coupling_;
  Vector<Scalar> diag_;
};

template <typename Scalar>
Eigen::Index matching_index(const Vector<Scalar>& potential, Scalar e, GridKind kind) {
  const Eigen::Index n = potential.size();
  const Eigen::Index mid = (n - 1) / 2;
  Eigen::Index best = -1;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const bool turning = (potential[i] - e) * (potential[i + 1] - e) < Scalar(0);
    if (!turning) continue;
    if (kind == GridKind::Radial) {
      best = i;  // outermost
    } else if (best < 0 || std::abs(double(i - mid)) < std::abs(double(best - mid))) {
      best = i;
    }
  }
  if (best < 0) best = mid;
  return std::clamp<Eigen::Index>(best, 0, n - 2);
}

}  // namespace detail

/// Shooting on the discrete flux-form equation. Returns the normalized state
/// with `target_nodes` nodes whose energy lies in `bracket`.
template <typename Scalar>
BoundState<Scalar> shoot(const Grid<Scalar>& grid, const MassProfile<Scalar>& mass,
                         const PotentialProfile<Scalar>& potential, const AmbiguitySet<Scalar>& ambiguity,
                         Channel channel, int target_nodes, std::pair<Scalar, Scalar> bracket, Scalar tol) {
  if (!(tol > Scalar(0))) throw std::invalid_argument("shoot: tol must be positive");
  if (target_nodes < 0) throw std::invalid_argument("shoot: target node count must be non-negative");
  auto [lo, hi] = bracket;
  if (!(hi > lo)) throw std::invalid_argument("shoot: bracket must satisfy lo < hi");

  const DiscreteOperator<Scalar> op = discretize(Problem<Scalar>{channel, mass, potential, ambiguity}, grid);
  const detail::Recurrence<Scalar> rec(op);

  int nodes_lo = rec.outward_nodes(lo);
  int nodes_hi = rec.outward_nodes(hi);
  if (nodes_lo > target_nodes || nodes_hi <= target_nodes) {
    throw std::invalid_argument("shoot: bracket does not straddle the requested state (node counts " +
                                std::to_string(nodes_lo) + " and " + std::to_string(nodes_hi) + ")");
  }
  // Narrow until exactly one eigenvalue is inside.
  for (int it = 0; nodes_lo != target_nodes || nodes_hi != target_nodes + 1; ++it) {
    if (it > 400) throw SolverError("shoot: could not isolate a single level in the bracket");
    const Scalar mid = lo + (hi - lo) / Scalar(2);
    const int c = rec.outward_nodes(mid);
    if (c <= target_nodes) {
      lo = mid;
      nodes_lo = c;
    } else {
      hi = mid;
      nodes_hi = c;
    }
  }

  const Eigen::Index m = detail::matching_index(rec.potential(), lo + (hi - lo) / Scalar(2), grid.kind());
  Scalar f_lo = rec.mismatch(lo, m);
  const Scalar f_hi = rec.mismatch(hi, m);
  if ((f_lo < Scalar(0)) == (f_hi < Scalar(0))) {
    throw SolverError("shoot: no bound state in bracket (matching discriminant does not change sign)");
  }
  while (hi - lo > tol) {
    const Scalar mid = lo + (hi - lo) / Scalar(2);
    if (mid <= lo || mid >= hi) break;
    const Scalar f = rec.mismatch(mid, m);
    if ((f < Scalar(0)) == (f_lo < Scalar(0))) {
      lo = mid;
      f_lo = f;
    } else {
      hi = mid;
    }
  }

  BoundState<Scalar> state;
  state.energy = lo + (hi - lo) / Scalar(2);
  const Eigen::Index n = grid.size();
  const Vector<Scalar> u = rec.outward(state.energy, m);
  const Vector<Scalar> v = rec.inward(state.energy, m + 1);
  const Scalar scale = (u[m] * v[0] + u[m + 1] * v[1]) / (v[0] * v[0] + v[1] * v[1]);
  state.samples.resize(n);
  state.samples.head(m + 1) = u.head(m + 1);
  state.samples.tail(n - m - 1) = scale * v.tail(n - m - 1);
  detail::normalize_state(state.samples, grid.spacing());
  state.nodes = count_nodes(state.samples);
  using std::sqrt;
  state.norm = sqrt(grid.spacing() * state.samples.squaredNorm());
  if (state.nodes != target_nodes) {
    throw SolverError("shoot: matched state has " + std::to_string(state.nodes) + " nodes, expected " +
                      std::to_string(target_nodes));
  }
  return state;
}

}  // namespace pdm
