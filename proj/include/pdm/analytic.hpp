#pragma once

// Closed-form reference spectra (hbar = 1).

#include "pdm/core.hpp"

#include <stdexcept>

namespace pdm {

template <typename Scalar = double>
Scalar constant_mass_oscillator_energy(int n, Scalar m0, Scalar omega) {
  if (n < 0) throw std::invalid_argument("oscillator: n must be non-negative");
  if (!(m0 > Scalar(0))) throw std::invalid_argument("oscillator: m0 must be positive");
  return (Scalar(n) + Scalar(0.5)) * omega;
}

template <typename Scalar = double>
Scalar constant_mass_coulomb_energy(int n, Scalar z, Scalar m0, Scalar e) {
  if (n < 1) throw std::invalid_argument("coulomb: n must be at least 1");
  const Scalar e2 = e * e;
  return -m0 * z * z * e2 * e2 / (Scalar(2) * Scalar(n) * Scalar(n));
}

namespace detail {
inline void check_coulomb_numbers(int n, int l) {
  if (l < 0 || n < l + 1) throw std::invalid_argument("coulomb: need 0 <= l <= n - 1");
}
}  // namespace detail

/// Whether the (n, l) level of the m0/(1 + kappa r)^2 Coulomb problem is
/// bound (units m0 = e = 1). The inequality is strict: equality is unbound.
template <typename Scalar = double>
bool pdm_coulomb_level_exists(Scalar z, Scalar kappa, int n, int l, Scalar beta) {
  detail::check_coulomb_numbers(n, l);
  const Scalar ll = Scalar(l) * Scalar(l + 1);
  return kappa / Scalar(2) * (ll + Scalar(n) * Scalar(n) - Scalar(2) * beta) < z;
}

/// Exact level of the m0/(1 + kappa r)^2 Coulomb problem for any ordering
/// (units m0 = e = 1). Does not check existence.
template <typename Scalar = double>
Scalar pdm_coulomb_energy(Scalar z, Scalar kappa, int n, int l, const AmbiguitySet<Scalar>& amb) {
  detail::check_coulomb_numbers(n, l);
  if (!(kappa >= Scalar(0))) throw std::invalid_argument("coulomb: kappa must be non-negative");
  const Scalar ll = Scalar(l) * Scalar(l + 1);
  const Scalar n2 = Scalar(n) * Scalar(n);
  const Scalar shifted = z - kappa / Scalar(2) * (ll - Scalar(2) * amb.beta());
  const Scalar tail = Scalar(2) * ll - n2 - Scalar(4) * amb.beta() +
                      (Scalar(1) + Scalar(4) * amb.alpha()) * (Scalar(1) + Scalar(4) * amb.gamma());
  return -shifted * shifted / (Scalar(2) * n2) + z * kappa / Scalar(2) + kappa * kappa / Scalar(8) * tail;
}

template <typename Scalar = double>
struct CoulombLevel {
  int n = 1;
  int l = 0;
  Scalar energy{};
  bool exists = false;
};

template <typename Scalar = double>
CoulombLevel<Scalar> pdm_coulomb_level(Scalar z, Scalar kappa, int n, int l, const AmbiguitySet<Scalar>& amb) {
  return {n, l, pdm_coulomb_energy(z, kappa, n, l, amb), pdm_coulomb_level_exists(z, kappa, n, l, amb.beta())};
}

/// Same level for general m0 and e. Lengths scale by 1/(m0 e^2) and energies
/// by m0 e^4, so kappa enters as kappa / (m0 e^2).
template <typename Scalar = double>
CoulombLevel<Scalar> pdm_coulomb_level(Scalar z, Scalar e, Scalar m0, Scalar kappa, int n, int l,
                                       const AmbiguitySet<Scalar>& amb) {
  if (!(m0 > Scalar(0)) || !(e > Scalar(0))) throw std::invalid_argument("coulomb: m0 and e must be positive");
  const Scalar e2 = e * e;
  CoulombLevel<Scalar> level = pdm_coulomb_level(z, kappa / (m0 * e2), n, l, amb);
  level.energy *= m0 * e2 * e2;
  return level;
}

}  // namespace pdm
