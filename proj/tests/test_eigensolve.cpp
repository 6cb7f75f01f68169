#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pdm/convergence.hpp"
#include "pdm/eigensolve.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace pdm;
using A = AmbiguitySet<double>;

namespace {

SymmetricTridiagonal<double> toeplitz(Eigen::Index n, double d, double o) {
  return {Vector<double>::Constant(n, d), Vector<double>::Constant(n - 1, o)};
}

Problem<double> oscillator(double kappa, const A& amb) {
  return {Channel::line(), MassProfile<>::quadratic_well(1, kappa), PotentialProfile<>::harmonic(1, 1), amb};
}

Problem<double> hydrogen(int l) {
  return {Channel::radial(l), MassProfile<>::constant(1), PotentialProfile<>::coulomb(1, 1), A::bd()};
}

}  // namespace

TEST_CASE("sturm counts") {
  auto diag = toeplitz(3, 1, 0);
  CHECK(sturm_count(diag, 2.0) == 3);
  CHECK(sturm_count(diag, 0.5) == 0);
  // eigenvalue exactly at the shift is not counted
  CHECK(sturm_count(diag, 1.0) == 0);

  auto lap = toeplitz(100, 1, -0.5);
  int below = 0;
  for (int k = 1; k <= 100; ++k) below += (1 - std::cos(k * M_PI / 101)) < 1 ? 1 : 0;
  CHECK(below == 50);
  CHECK(sturm_count(lap, 1.0) == 50);
}

TEST_CASE("sturm counts survive zero off-diagonals and zero pivots") {
  Vector<double> d(4), o(3);
  d << 0, 0, 2, -1;
  o << 0, 1, 0;
  SymmetricTridiagonal<double> h(d, o);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(h.to_dense());
  for (double e : {-2.0, -0.5, 0.5, 1.0, 3.0}) {
    CHECK(sturm_count(h, e) == (ref.eigenvalues().array() < e).count());
  }
}

TEST_CASE("bisection agrees with a dense solver on random matrices") {
  std::mt19937 rng(3);
  std::normal_distribution<double> nd(0, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 40;
    Vector<double> d(n), o(n - 1);
    for (auto& v : d) v = nd(rng);
    for (auto& v : o) v = nd(rng);
    SymmetricTridiagonal<double> h(d, o);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(h.to_dense());
    for (Eigen::Index k = 0; k < n; k += 7) {
      CHECK(std::abs(eigenvalue_by_index(h, k, 1e-13) - ref.eigenvalues()[k]) < 1e-11);
    }
  }
}

TEST_CASE("eigenpairs of the deformed oscillator") {
  auto g = make_grid<double>(GridKind::Line, -10, 10, 999);
  auto h = assemble(oscillator(0.1, A::lk()), g);
  auto spec = lowest_eigenpairs(h, 6, 1e-13, g.spacing());
  REQUIRE(spec.states.size() == 6);
  for (std::size_t i = 0; i < spec.states.size(); ++i) {
    const auto& s = spec.states[i];
    CHECK(s.nodes == int(i));
    CHECK(s.norm == doctest::Approx(1).epsilon(1e-10));
    CHECK(std::abs(h.rayleigh_quotient(s.samples) - s.energy) <= 1e-9 * std::abs(s.energy));
    const double e = s.energy;
    CHECK(sturm_count(h, e + 1e-10) - sturm_count(h, e - 1e-10) == 1);
    if (i > 0) CHECK(s.energy > spec.states[i - 1].energy);
    for (std::size_t j = 0; j < i; ++j) {
      CHECK(std::abs(s.samples.dot(spec.states[j].samples) * g.spacing()) < 1e-8);
    }
  }
}

TEST_CASE("degenerate clusters are orthogonalized") {
  // two decoupled copies of the same block
  Vector<double> d(8), o(7);
  d << 2, 2, 2, 2, 2, 2, 2, 2;
  o << -1, -1, -1, 0, -1, -1, -1;
  SymmetricTridiagonal<double> h(d, o);
  auto spec = lowest_eigenpairs(h, 2, 1e-14);
  CHECK(spec.states[0].energy == doctest::Approx(spec.states[1].energy).epsilon(1e-12));
  CHECK(std::abs(spec.states[0].samples.dot(spec.states[1].samples)) < 1e-8);
}

TEST_CASE("textbook spectra after convergence") {
  SUBCASE("oscillator") {
    auto p = Problem<double>{Channel::line(), MassProfile<>::constant(1), PotentialProfile<>::harmonic(1, 1), A::bd()};
    for (int n = 0; n < 6; ++n) {
      CHECK(std::abs(converged_energy(p, make_grid<double>(GridKind::Line, -10, 10, 999), n).energy - (n + 0.5)) < 1e-6);
    }
  }
  SUBCASE("hydrogen s states") {
    for (int n = 1; n <= 2; ++n) {
      auto e = converged_energy(hydrogen(0), make_grid<double>(GridKind::Radial, 0, 40.0 * n * n, 1000 * n * n - 1), n - 1);
      CHECK(std::abs(e.energy + 0.5 / (n * n)) < 1e-5);
    }
  }
  SUBCASE("deformed coulomb ground state") {
    Problem<double> p{Channel::radial(0), MassProfile<>::coulomb_deformed(1, 0.2), PotentialProfile<>::coulomb(1, 1), A::bd()};
    CHECK(std::abs(converged_energy(p, make_grid<double>(GridKind::Radial, 0, 40, 999), 0).energy + 0.2) < 1e-4);
  }
}

TEST_CASE("shooting reproduces the matrix spectrum") {
  SUBCASE("constant-mass oscillator ground state") {
    auto g = make_grid<double>(GridKind::Line, -10, 10, 1999);
    auto p = Problem<double>{Channel::line(), MassProfile<>::constant(1), PotentialProfile<>::harmonic(1, 1), A::bd()};
    auto s = shoot(g, p.mass, p.potential, p.ambiguity, p.channel, 0, {0.0, 1.0}, 1e-12);
    CHECK(s.energy == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(std::abs(s.energy - eigenvalue_by_index(assemble(p, g), 0, 1e-13)) < 1e-10);
    CHECK(s.nodes == 0);
  }
  SUBCASE("deformed oscillator, every preset, several levels") {
    auto g = make_grid<double>(GridKind::Line, -10, 10, 999);
    for (const A& a : {A::bd(), A::lk(), A::gw()}) {
      auto p = oscillator(0.1, a);
      auto h = assemble(p, g);
      for (int n = 0; n < 6; ++n) {
        auto s = shoot(g, p.mass, p.potential, a, p.channel, n, {0.0, 8.0}, 1e-12);
        CHECK(std::abs(s.energy - eigenvalue_by_index(h, n, 1e-13)) < 1e-9);
        CHECK(s.norm == doctest::Approx(1).epsilon(1e-10));
      }
    }
  }
  SUBCASE("hydrogen 2s") {
    auto g = make_grid<double>(GridKind::Radial, 0, 80, 7999);
    auto p = hydrogen(0);
    auto s = shoot(g, p.mass, p.potential, p.ambiguity, p.channel, 1, {-0.2, -0.05}, 1e-12);
    CHECK(s.energy == doctest::Approx(-0.125).epsilon(1e-4));
    CHECK(std::abs(s.energy - eigenvalue_by_index(assemble(p, g), 1, 1e-13)) < 1e-10);
    CHECK(s.nodes == 1);
  }
  SUBCASE("eigenvectors agree up to sign") {
    auto g = make_grid<double>(GridKind::Line, -8, 8, 399);
    auto p = oscillator(0.3, A::gw());
    auto s = shoot(g, p.mass, p.potential, p.ambiguity, p.channel, 3, {0.0, 10.0}, 1e-13);
    auto spec = lowest_eigenpairs(assemble(p, g), 4, 1e-13, g.spacing());
    CHECK((s.samples - spec.states[3].samples).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("shooting errors") {
  auto g = make_grid<double>(GridKind::Line, -10, 10, 499);
  auto p = oscillator(0.1, A::bd());
  CHECK_THROWS_AS(shoot(g, p.mass, p.potential, p.ambiguity, p.channel, 2, {0.0, 1.0}, 1e-12), std::invalid_argument);
  CHECK_THROWS_AS(shoot(g, p.mass, p.potential, p.ambiguity, p.channel, 0, {1.0, 0.0}, 1e-12), std::invalid_argument);
  CHECK_THROWS_AS(shoot(g, p.mass, p.potential, p.ambiguity, p.channel, 0, {0.0, 1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("argument validation") {
  auto h = toeplitz(5, 1, -0.5);
  CHECK_THROWS_AS(lowest_eigenpairs(h, 0, 1e-12), std::invalid_argument);
  CHECK_THROWS_AS(lowest_eigenpairs(h, 6, 1e-12), std::invalid_argument);
  CHECK_THROWS_AS(lowest_eigenpairs(h, 2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(eigenvalue_by_index(h, 5, 1e-12), std::invalid_argument);
}

TEST_CASE("node counting ignores round-off in tails") {
  Vector<double> v(6);
  v << 1e-20, -1e-20, 0.5, 1.0, -0.3, 1e-19;
  CHECK(count_nodes(v) == 1);
}
