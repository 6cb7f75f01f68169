#pragma once

// Test-only reference: the symmetrized ordering operator applied directly,
//   -1/4 (m^a D m^b D m^g + m^g D m^b D m^a) psi + V psi,
// with every D a central difference of a continuous function. Nothing here
// goes through the effective-potential reduction used by the library.

#include <cmath>
#include <functional>

namespace oracle {

using Fn = std::function<double(double)>;

inline Fn derivative(Fn f, double step) {
  return [f, step](double x) { return (f(x + step) - f(x - step)) / (2 * step); };
}

inline double factored_line(const Fn& m, const Fn& psi, double alpha, double beta, double gamma, double x,
                            double step) {
  auto pow_m = [m](double p) { return Fn([m, p](double y) { return std::pow(m(y), p); }); };
  auto chain = [&](double outer, double inner) {
    Fn mi = pow_m(inner), mb = pow_m(beta), mo = pow_m(outer);
    Fn g = derivative([mi, psi](double y) { return mi(y) * psi(y); }, step);
    Fn f = derivative([mb, g](double y) { return mb(y) * g(y); }, step);
    return mo(x) * f(x);
  };
  return -0.25 * (chain(alpha, gamma) + chain(gamma, alpha));
}

// Spherically symmetric psi(r) in three dimensions with angular momentum l:
// div of a radial field F is (r^2 F)'/r^2, and the angular part of the
// Laplacian only meets the product m^a m^b m^g = 1/m.
inline double factored_radial(const Fn& m, const Fn& psi, double alpha, double beta, double gamma, int l, double r,
                              double step) {
  auto pow_m = [m](double p) { return Fn([m, p](double y) { return std::pow(m(y), p); }); };
  auto chain = [&](double outer, double inner) {
    Fn mi = pow_m(inner), mb = pow_m(beta), mo = pow_m(outer);
    Fn g = derivative([mi, psi](double y) { return mi(y) * psi(y); }, step);
    Fn f = derivative([mb, g](double y) { return y * y * mb(y) * g(y); }, step);
    return mo(r) * f(r) / (r * r);
  };
  const double angular = double(l) * double(l + 1) / (2 * m(r) * r * r) * psi(r);
  return -0.25 * (chain(alpha, gamma) + chain(gamma, alpha)) + angular;
}

}  // namespace oracle
