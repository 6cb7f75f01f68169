#pragma once

// Domain types shared by every module: grids, ambiguity triples, and the
// parametric mass / potential families with their derivative evaluation.
// All types are templated on the scalar (double, long double).

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace pdm {

/// Raised when an iterative procedure fails to produce a usable answer.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class GridKind { Line, Radial };

/// Uniform grid of interior points with implicit zero (Dirichlet) values at
/// both endpoints. Interior point i (0-based) sits at lower + (i+1)*spacing.
template <typename Scalar = double>
class Grid {
 public:
  Grid(GridKind kind, Scalar lower, Scalar upper, Eigen::Index n_interior)
      : kind_(kind), lower_(lower), upper_(upper), n_(n_interior) {
    using std::isfinite;
    if (!isfinite(lower) || !isfinite(upper) || !(upper > lower)) {
      throw std::invalid_argument("grid: upper bound must exceed lower bound");
    }
    if (n_interior < 3) {
      throw std::invalid_argument("grid: need at least 3 interior points");
    }
    if (kind == GridKind::Radial && lower != Scalar(0)) {
      throw std::invalid_argument("grid: radial grids must start at r = 0");
    }
    spacing_ = (upper - lower) / Scalar(n_interior + 1);
  }

  GridKind kind() const { return kind_; }
  Scalar lower() const { return lower_; }
  Scalar upper() const { return upper_; }
  Eigen::Index size() const { return n_; }
  Scalar spacing() const { return spacing_; }

  Scalar point(Eigen::Index i) const { return lower_ + Scalar(i + 1) * spacing_; }

  Vector<Scalar> points() const {
    Vector<Scalar> x(n_);
    for (Eigen::Index i = 0; i < n_; ++i) x[i] = point(i);
    return x;
  }

  /// Same box, half the spacing.
  Grid refined() const { return Grid(kind_, lower_, upper_, 2 * n_ + 1); }

  /// Twice the box at the same spacing. Line boxes grow symmetrically about
  /// their centre; radial boxes keep r = 0 and double the outer radius.
  Grid doubled_box() const {
    if (kind_ == GridKind::Radial) {
      return Grid(kind_, lower_, Scalar(2) * upper_, 2 * (n_ + 1) - 1);
    }
    const Scalar centre = (lower_ + upper_) / Scalar(2);
    const Scalar half = upper_ - centre;
    return Grid(kind_, centre - Scalar(2) * half, centre + Scalar(2) * half,
                2 * (n_ + 1) - 1);
  }

 private:
  GridKind kind_;
  Scalar lower_;
  Scalar upper_;
  Eigen::Index n_;
  Scalar spacing_;
};

template <typename Scalar = double>
Grid<Scalar> make_grid(GridKind kind, Scalar lower, Scalar upper, Eigen::Index n_interior) {
  return Grid<Scalar>(kind, lower, upper, n_interior);
}

/// Operator-ordering triple (alpha, beta, gamma) with alpha + beta + gamma = -1.
template <typename Scalar = double>
class AmbiguitySet {
 public:
  AmbiguitySet(Scalar alpha, Scalar beta, Scalar gamma)
      : alpha_(alpha), beta_(beta), gamma_(gamma) {
    using std::abs;
    if (!(abs(alpha + beta + gamma + Scalar(1)) <= Scalar(1e-12))) {
      throw std::invalid_argument("ambiguity: alpha + beta + gamma must equal -1");
    }
  }

  static AmbiguitySet bd() { return {Scalar(0), Scalar(-1), Scalar(0)}; }
  static AmbiguitySet lk() { return {Scalar(-0.5), Scalar(-0.5), Scalar(0)}; }
  static AmbiguitySet gw() { return {Scalar(-1), Scalar(0), Scalar(0)}; }

  Scalar alpha() const { return alpha_; }
  Scalar beta() const { return beta_; }
  Scalar gamma() const { return gamma_; }

  /// "BD", "LK", "GW" for the presets, empty otherwise.
  std::string preset_name() const {
    if (*this == bd()) return "BD";
    if (*this == lk()) return "LK";
    if (*this == gw()) return "GW";
    return {};
  }

  friend bool operator==(const AmbiguitySet& a, const AmbiguitySet& b) {
    return a.alpha_ == b.alpha_ && a.beta_ == b.beta_ && a.gamma_ == b.gamma_;
  }

 private:
  Scalar alpha_;
  Scalar beta_;
  Scalar gamma_;
};

/// Mass and its first two derivatives at one coordinate.
template <typename Scalar = double>
struct MassSample {
  Scalar m;
  Scalar dm;
  Scalar d2m;
};

template <typename Scalar = double>
class MassProfile {
 public:
  enum class Family { Constant, CoulombDeformed, QuadraticWell, Custom };
  using Sampler = std::function<Scalar(Scalar)>;

  static MassProfile constant(Scalar m0) { return MassProfile(Family::Constant, m0, Scalar(0)); }

  /// m(r) = m0 / (1 + kappa r)^2
  static MassProfile coulomb_deformed(Scalar m0, Scalar kappa) {
    return MassProfile(Family::CoulombDeformed, m0, kappa);
  }

  /// m(x) = m0 (1 + kappa x^2)
  static MassProfile quadratic_well(Scalar m0, Scalar kappa) {
    return MassProfile(Family::QuadraticWell, m0, kappa);
  }

  /// Only m(x) is supplied; derivatives come from central differences.
  static MassProfile custom(Sampler sampler) {
    if (!sampler) throw std::invalid_argument("mass: custom sampler is empty");
    MassProfile p(Family::Custom, Scalar(1), Scalar(0));
    p.sampler_ = std::move(sampler);
    return p;
  }

  Family family() const { return family_; }
  Scalar m0() const { return m0_; }
  Scalar kappa() const { return kappa_; }
  const Sampler& sampler() const { return sampler_; }

  std::string describe() const;

 private:
  MassProfile(Family family, Scalar m0, Scalar kappa) : family_(family), m0_(m0), kappa_(kappa) {
    if (!(m0 > Scalar(0))) throw std::invalid_argument("mass: m0 must be positive");
    if (!(kappa >= Scalar(0))) throw std::invalid_argument("mass: kappa must be non-negative");
  }

  Family family_;
  Scalar m0_;
  Scalar kappa_;
  Sampler sampler_;
};

template <typename Scalar = double>
class PotentialProfile {
 public:
  enum class Family { Coulomb, Harmonic, Custom };
  using Sampler = std::function<Scalar(Scalar)>;

  /// V(r) = -Z e^2 / r, r > 0.
  static PotentialProfile coulomb(Scalar z, Scalar e) {
    PotentialProfile p(Family::Coulomb);
    p.a_ = z;
    p.b_ = e;
    return p;
  }

  /// V(x) = m0 omega^2 x^2 / 2.
  static PotentialProfile harmonic(Scalar m0, Scalar omega) {
    PotentialProfile p(Family::Harmonic);
    p.a_ = m0;
    p.b_ = omega;
    return p;
  }

  static PotentialProfile custom(Sampler sampler) {
    if (!sampler) throw std::invalid_argument("potential: custom sampler is empty");
    PotentialProfile p(Family::Custom);
    p.sampler_ = std::move(sampler);
    return p;
  }

  static PotentialProfile zero() {
    return custom([](Scalar) { return Scalar(0); });
  }

  Family family() const { return family_; }
  Scalar charge() const { return a_; }
  Scalar coupling() const { return b_; }
  Scalar mass() const { return a_; }
  Scalar omega() const { return b_; }

  Scalar operator()(Scalar x) const {
    switch (family_) {
      case Family::Coulomb:
        if (!(x > Scalar(0))) throw std::domain_error("potential: Coulomb needs r > 0");
        return -a_ * b_ * b_ / x;
      case Family::Harmonic:
        return a_ * b_ * b_ * x * x / Scalar(2);
      case Family::Custom:
        return sampler_(x);
    }
    return Scalar(0);
  }

  std::string describe() const;

 private:
  explicit PotentialProfile(Family family) : family_(family) {}

  Family family_;
  Scalar a_ = Scalar(0);
  Scalar b_ = Scalar(0);
  Sampler sampler_;
};

/// Mass and analytic derivatives at x. `fd_step` is only used by Custom
/// profiles (central differences); assembly passes the grid spacing.
template <typename Scalar>
MassSample<Scalar> eval_mass(const MassProfile<Scalar>& profile, Scalar x,
                             Scalar fd_step = Scalar(1e-4)) {
  using Family = typename MassProfile<Scalar>::Family;
  const Scalar m0 = profile.m0();
  const Scalar k = profile.kappa();
  MassSample<Scalar> s{};
  switch (profile.family()) {
    case Family::Constant:
      s = {m0, Scalar(0), Scalar(0)};
      break;
    case Family::CoulombDeformed: {
      const Scalar g = Scalar(1) + k * x;
      s = {m0 / (g * g), Scalar(-2) * m0 * k / (g * g * g), Scalar(6) * m0 * k * k / (g * g * g * g)};
      break;
    }
    case Family::QuadraticWell:
      s = {m0 * (Scalar(1) + k * x * x), Scalar(2) * m0 * k * x, Scalar(2) * m0 * k};
      break;
    case Family::Custom: {
      const auto& f = profile.sampler();
      const Scalar mp = f(x + fd_step);
      const Scalar mc = f(x);
      const Scalar mm = f(x - fd_step);
      s = {mc, (mp - mm) / (Scalar(2) * fd_step), (mp - Scalar(2) * mc + mm) / (fd_step * fd_step)};
      break;
    }
  }
  using std::isfinite;
  if (!(s.m > Scalar(0)) || !isfinite(s.m)) {
    throw std::domain_error("mass: non-positive mass at x = " + std::to_string(double(x)));
  }
  return s;
}

/// Laplacian of 1/m built from a mass sample. dimension 1: d^2/dx^2;
/// dimension 3 (spherically symmetric): (1/r^2) d/dr (r^2 d/dr) at r = x.
template <typename Scalar>
Scalar inverse_mass_laplacian(const MassSample<Scalar>& s, Scalar x, int dimension) {
  const Scalar m2 = s.m * s.m;
  const Scalar second = Scalar(2) * s.dm * s.dm / (m2 * s.m) - s.d2m / m2;
  if (dimension == 1) return second;
  if (dimension == 3) {
    if (!(x > Scalar(0))) throw std::domain_error("inverse_mass_laplacian: radial evaluation needs r > 0");
    return second + Scalar(2) / x * (-s.dm / m2);
  }
  throw std::invalid_argument("inverse_mass_laplacian: dimension must be 1 or 3");
}

template <typename Scalar>
Scalar inverse_mass_laplacian(const MassProfile<Scalar>& profile, Scalar x, int dimension,
                              Scalar fd_step = Scalar(1e-4)) {
  if (dimension == 3 && !(x > Scalar(0))) {
    throw std::domain_error("inverse_mass_laplacian: radial evaluation needs r > 0");
  }
  return inverse_mass_laplacian(eval_mass(profile, x, fd_step), x, dimension);
}

/// Re-express a profile in another scalar type. Custom samplers are wrapped.
template <typename To, typename From>
MassProfile<To> profile_cast(const MassProfile<From>& p) {
  using F = typename MassProfile<From>::Family;
  switch (p.family()) {
    case F::Constant:
      return MassProfile<To>::constant(To(p.m0()));
    case F::CoulombDeformed:
      return MassProfile<To>::coulomb_deformed(To(p.m0()), To(p.kappa()));
    case F::QuadraticWell:
      return MassProfile<To>::quadratic_well(To(p.m0()), To(p.kappa()));
    case F::Custom:
      break;
  }
  auto f = p.sampler();
  return MassProfile<To>::custom([f](To x) { return To(f(From(x))); });
}

template <typename To, typename From>
PotentialProfile<To> profile_cast(const PotentialProfile<From>& p) {
  using F = typename PotentialProfile<From>::Family;
  switch (p.family()) {
    case F::Coulomb:
      return PotentialProfile<To>::coulomb(To(p.charge()), To(p.coupling()));
    case F::Harmonic:
      return PotentialProfile<To>::harmonic(To(p.mass()), To(p.omega()));
    case F::Custom:
      break;
  }
  return PotentialProfile<To>::custom([p](To x) { return To(p(From(x))); });
}

template <typename To, typename From>
AmbiguitySet<To> ambiguity_cast(const AmbiguitySet<From>& a) {
  return {To(a.alpha()), To(a.beta()), To(a.gamma())};
}

template <typename To, typename From>
Grid<To> grid_cast(const Grid<From>& g) {
  return Grid<To>(g.kind(), To(g.lower()), To(g.upper()), g.size());
}

namespace detail {
inline std::string num(double v) {
  std::string s = std::to_string(v);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}
}  // namespace detail

template <typename Scalar>
std::string MassProfile<Scalar>::describe() const {
  switch (family_) {
    case Family::Constant:
      return "constant(" + detail::num(double(m0_)) + ")";
    case Family::CoulombDeformed:
      return "coulomb_deformed(" + detail::num(double(m0_)) + "," + detail::num(double(kappa_)) + ")";
    case Family::QuadraticWell:
      return "quadratic_well(" + detail::num(double(m0_)) + "," + detail::num(double(kappa_)) + ")";
    case Family::Custom:
      return "custom";
  }
  return {};
}

template <typename Scalar>
std::string PotentialProfile<Scalar>::describe() const {
  switch (family_) {
    case Family::Coulomb:
      return "coulomb(" + detail::num(double(a_)) + "," + detail::num(double(b_)) + ")";
    case Family::Harmonic:
      return "harmonic(" + detail::num(double(a_)) + "," + detail::num(double(b_)) + ")";
    case Family::Custom:
      return "custom";
  }
  return {};
}

}  // namespace pdm
