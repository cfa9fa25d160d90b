#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "octo/calculus.hpp"
#include "octo/error.hpp"
#include "test_support.hpp"

using namespace octo;
using octo::test::vec;

namespace {

const TowerSpace& space2() {
  static const TowerSpace s = TowerSpace::standard(2, 40);
  return s;
}

TowerVector unit_sample(octo::test::Sampler& sampler, std::size_t degree) {
  TowerVector x = sampler.generic(2, degree);
  return scaled(1 / tower_norm(space2(), x), x);
}

}  // namespace

TEST_CASE("phi basics") {
  const TowerSpace& s = space2();
  const TowerVector x = vec({0.3L, -0.2L}, {0.5L, 0.1L});
  const Real nx = tower_norm(s, x);
  for (Real t : {-0.9L, -0.3L, 0.0L, 0.25L, 2.0L}) {
    CHECK(std::fabs(phi(s, x, x, t) - t * nx) <= 1e-18L);
  }
  CHECK(phi(s, x, TowerVector::unit(2, 3), 0) == 0);

  // At e_2 the direction e_1 is tangent: phi >= 0 and phi(t)/t -> 0.
  const TowerVector e1 = TowerVector::unit(2, 1), e2 = TowerVector::unit(2, 2);
  Real previous = INFINITY;
  for (int k = 1; k <= 30; ++k) {
    const Real t = std::ldexp(1.0L, -k);
    CHECK(phi(s, e2, e1, t) >= 0);
    CHECK(phi(s, e2, e1, -t) >= 0);
    const Real q = phi(s, e2, e1, t) / t;
    CHECK(q <= previous);
    previous = q;
  }
  CHECK(previous <= 1e-9L);
}

TEST_CASE("directional derivative examples") {
  const TowerSpace& s = space2();
  SUBCASE("radial direction") {
    octo::test::Sampler sampler(1);
    const TowerVector x = unit_sample(sampler, 5);
    const DerivativeEstimate d = directional_derivative(s, x, x);
    CHECK(std::fabs(d.right - 1) <= 1e-8L);
    CHECK(std::fabs(d.left - 1) <= 1e-8L);
    CHECK(d.gateaux);
  }
  SUBCASE("tangent direction at a pole") {
    const DerivativeEstimate d = directional_derivative(s, TowerVector::unit(2, 2), TowerVector::unit(2, 1));
    CHECK(std::fabs(d.right) <= 1e-9L);
    CHECK(std::fabs(d.left) <= 1e-9L);
    CHECK(d.gateaux);
  }
  SUBCASE("flat region above a base point") {
    for (std::size_t n = 1; n <= 6; ++n) {
      const DerivativeEstimate d = directional_derivative(s, vec({1, 0}, {}), TowerVector::unit(2, n));
      CHECK(d.right == 0);
      CHECK(d.left == 0);
    }
  }
  SUBCASE("step trail layout") {
    StepSchedule steps;
    steps.halvings = 12;
    const DerivativeEstimate d = directional_derivative(s, vec({1, 0}, {0.3L}), TowerVector::unit(2, 1), steps);
    REQUIRE(d.steps.size() == 26);
    for (std::size_t i = 1; i < 13; ++i) {
      CHECK(d.steps[i].t > 0);
      CHECK(d.steps[i].t < d.steps[i - 1].t);
      CHECK(d.steps[13 + i].t < 0);
      CHECK(std::fabs(d.steps[13 + i].t) < std::fabs(d.steps[12 + i].t));
    }
    CHECK(d.tol_used == steps.tol);
  }
  SUBCASE("origin is refused") {
    CHECK_THROWS_AS(directional_derivative(s, TowerVector::zero(2, 3), TowerVector::unit(2, 1)), Error);
  }
}

TEST_CASE("directional derivatives match the analytic gradient and are two-sided") {
  octo::test::Sampler sampler(99);
  const TowerSpace& s = space2();
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = sampler.index(1, 8);
    const TowerVector x = trial % 2 ? sampler.generic(2, m) : sampler.sparse(2, m);
    if (project(x, m).is_zero()) continue;
    const TowerVector h = sampler.generic(2, m);
    const DerivativeEstimate d = directional_derivative(s, x, h);
    CHECK(d.gateaux);
    CHECK(std::fabs(d.right - pairing(norm_gradient(s, x, m), h)) <= 1e-6L);
  }
}

TEST_CASE("phi scaling identities") {
  octo::test::Sampler sampler(4);
  const TowerSpace& s = space2();
  for (int trial = 0; trial < 200; ++trial) {
    const TowerVector x = sampler.generic(2, sampler.index(0, 8));
    const TowerVector h = sampler.generic(2, sampler.index(0, 8));
    const Real tau = std::pow(10.0L, sampler.uniform(-2, 2));
    const Real t = sampler.uniform(-2, 2);
    CHECK(phi_identities_violation(s, x, h, tau, t) <= 1e-10L);
    CHECK(phi_identities_violation(s, x, h, 1, t) == 0);
  }
  CHECK_THROWS_AS(phi_identities_violation(s, vec({1, 0}, {}), vec({1, 0}, {}), 0, 1), Error);
}

TEST_CASE("norming functional") {
  const TowerSpace& s = space2();
  SUBCASE("pole") {
    const TowerVector g = norming_functional(s, TowerVector::unit(2, 4), 4);
    CHECK(g == TowerVector::unit(2, 4));
  }
  SUBCASE("base point in the flat region") {
    const TowerVector g = norming_functional(s, vec({0, -2}, {0, 0}), 2);
    CHECK(g.base == std::vector<Real>{0, -1});
    CHECK(g.coords == std::vector<Real>{0, 0});
  }
  SUBCASE("certificate against finite differences and the dual ball") {
    octo::test::Sampler sampler(12);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t m = sampler.index(1, 8);
      const TowerVector x = sampler.generic(2, m);
      const TowerVector g = norming_functional(s, x, m);
      const Real value = level_norm(s, x, m).value;
      CHECK(std::fabs(pairing(g, x) - value) <= 1e-8L);
      for (int k = 0; k < 100; ++k) {
        TowerVector y = sampler.generic(2, m);
        y = scaled(1 / tower_norm(s, y), y);
        CHECK(std::fabs(pairing(g, y)) <= 1 + 1e-6L);
      }
      // Each coordinate against a central-difference directional derivative.
      for (std::size_t i = 0; i < 2; ++i) {
        TowerVector dir = TowerVector::zero(2, m);
        dir.base[i] = 1;
        CHECK(std::fabs(directional_derivative(s, x, dir).right - g.base[i]) <= 1e-6L);
      }
      for (std::size_t j = 1; j <= m; ++j) {
        CHECK(std::fabs(directional_derivative(s, x, TowerVector::unit(2, j)).right - g.coord(j)) <= 1e-6L);
      }
    }
  }
  SUBCASE("x^m = 0 is refused") {
    CHECK_THROWS_AS(norming_functional(s, vec({0, 0}, {0, 0, 3}), 2), Error);
  }
}

TEST_CASE("tangent decomposition") {
  const TowerSpace& s = space2();
  octo::test::Sampler sampler(21);
  SUBCASE("radial and tangent inputs") {
    const TowerVector x = sampler.generic(2, 4);
    const TangentDecomposition radial = tangent_decomposition(s, x, x, 4);
    CHECK(std::fabs(radial.C - 1) <= 1e-18L);
    CHECK(tower_norm(s, radial.h_tangent) <= 1e-17L);

    const TowerVector h = sampler.generic(2, 4);
    const TangentDecomposition first = tangent_decomposition(s, x, h, 4);
    const TangentDecomposition again = tangent_decomposition(s, x, first.h_tangent, 4);
    CHECK(std::fabs(again.C) <= 1e-17L);
    CHECK(tower_norm(s, axpy(1, again.h_tangent, -1, first.h_tangent)) <= 1e-17L);
  }
  SUBCASE("invariants and the 16/15 bound") {
    int tested = 0;
    for (int trial = 0; trial < 400 && tested < 100; ++trial) {
      const std::size_t m = sampler.index(1, 8);
      const TowerVector x = unit_sample(sampler, m);
      if (level_norm(s, x, m).value <= 15.0L / 16) continue;
      TowerVector h = sampler.generic(2, m);
      h = scaled(1 / tower_norm(s, h), h);
      const TangentDecomposition dec = tangent_decomposition(s, x, h, m);
      ++tested;
      CHECK(std::fabs(dec.C) <= 16.0L / 15 + 1e-6L);
      CHECK(std::fabs(pairing(dec.g, dec.h_tangent)) <= 1e-8L);
      CHECK(std::fabs(pairing(dec.g, x) - tower_norm(s, x)) <= 1e-8L);
      const TowerVector rebuilt = axpy(1, dec.h_tangent, dec.C, project(x, m));
      CHECK(tower_norm(s, axpy(1, rebuilt, -1, h)) <= 1e-17L);
      CHECK(is_bj_orthogonal(s, project(x, m), dec.h_tangent));
    }
    CHECK(tested >= 50);
  }
  SUBCASE("direction outside X_m is refused") {
    CHECK_THROWS_AS(tangent_decomposition(s, vec({1, 0}, {0.2L}), TowerVector::unit(2, 3), 2), Error);
  }
}

TEST_CASE("Birkhoff-James orthogonality") {
  const TowerSpace& s = space2();
  const TowerVector x = vec({0.4L, 0.1L}, {0.3L, -0.6L});
  CHECK_FALSE(is_bj_orthogonal(s, x, x));
  CHECK(is_bj_orthogonal(s, TowerVector::unit(2, 2), TowerVector::unit(2, 1)));
  CHECK_FALSE(is_bj_orthogonal(s, TowerVector::unit(2, 1), TowerVector::unit(2, 1)));
  CHECK_THROWS_AS(is_bj_orthogonal(s, x, TowerVector::zero(2, 2)), Error);
}

TEST_CASE("orthogonality is inherited by the next projection") {
  // Level identity: with mu = |||x^{n+1} + t h|||, lambda = |||x^{n+1}|||,
  // u = |x_{n+1}|,  phi_{x^n,h}(t) = H(mu) - H(lambda),  H(r) = r (1 - f(u/r)).
  const TowerSpace& s = space2();
  octo::test::Sampler sampler(31);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = sampler.index(1, 6);
    const TowerVector x = sampler.generic(2, n + 1);
    const TowerVector h = tangent_decomposition(s, x, sampler.generic(2, n), n).h_tangent;
    if (h.is_zero()) continue;
    const TowerVector xn = project(x, n), xn1 = project(x, n + 1);
    const ShapeFn& f = s.schedule().shape(n + 1);
    const Real u = std::fabs(x.coord(n + 1));
    auto H = [&](Real r) { return r * f.complement(std::min<Real>(u / r, 1)); };
    const Real lambda = tower_norm(s, xn1);
    for (Real t : symmetric_log_grid()) {
      const Real lower = phi(s, xn, h, t);
      const Real upper = phi(s, xn1, h, t);
      CHECK(lower >= -1e-12L);
      CHECK(upper >= -1e-12L);
      CHECK(std::fabs(H(lambda + upper) - H(lambda) - lower) <= 1e-9L);
    }
    CHECK(is_bj_orthogonal(s, xn1, h));
  }
}

TEST_CASE("symmetric quotient") {
  const TowerSpace& s = space2();
  octo::test::Sampler sampler(17);
  for (int trial = 0; trial < 40; ++trial) {
    const TowerVector x = unit_sample(sampler, sampler.index(1, 8));
    TowerVector h = sampler.generic(2, sampler.index(1, 8));
    h = scaled(1 / tower_norm(s, h), h);
    Real previous = INFINITY;
    for (int k = 0; k <= 20; ++k) {
      const Real q = symmetric_quotient(s, x, h, std::ldexp(1.0L, -k));
      CHECK(q >= -1e-12L);
      CHECK(q <= previous + 1e-9L);
      previous = q;
    }
    CHECK(previous <= 1e-4L);
    for (int k = 1; k <= 20; ++k) {
      CHECK(std::fabs(symmetric_quotient(s, x, x, std::ldexp(1.0L, -k))) <= 1e-12L);
    }
  }
  CHECK_THROWS_AS(symmetric_quotient(s, vec({1, 0}, {}), vec({1, 0}, {}), 0), Error);
}

TEST_CASE("phi of projections converges to phi of the point") {
  const TowerSpace s = TowerSpace::standard(2, 40);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TowerVector x = random_vector(s, 30, SampleStyle::summable_tail, seed);
    const TowerVector h = random_vector(s, 3, SampleStyle::generic, seed + 100);
    const Real nh = tower_norm(s, h);
    for (Real t : {-0.5L, -0.01L, 0.001L, 0.3L}) {
      const Real full = phi(s, x, h, t);
      for (std::size_t n = 3; n <= 30; ++n) {
        const Real diff = std::fabs(phi(s, project(x, n), h, t) - full);
        CHECK(diff <= 2 * ell1_tail(x, n) + 1e-17L);
        CHECK(diff <= 2 * std::fabs(t) * nh + 1e-17L);
      }
    }
  }
}

TEST_CASE("projection ratio of phi along a tangent direction") {
  // For h in X_n tangent at x^n, phi_{x^n,h} / phi_{x^{n+1},h} -> 1 - f(tau) + tau f'(tau)
  // with tau = |x_{n+1}| / |||x^{n+1}|||; on the linear piece the ratio is exactly 1 + m.
  const TowerSpace s = TowerSpace::standard(1, 40);
  const TowerVector x = vec({0.8L}, {0.3L, 0.9L});
  const TowerVector h = tangent_decomposition(s, x, vec({0.2L}, {1}), 1).h_tangent;
  const ShapeFn& f = s.schedule().shape(2);
  const Real tau = 0.9L / tower_norm(s, x);
  REQUIRE(tau > f.l);
  REQUIRE(tau < f.s);
  const Real slope_factor = f.complement(tau) + tau * f.derivative(tau);
  CHECK(std::fabs(slope_factor - (1 + f.m)) <= 1e-18L);
  for (Real t : {0.5L, 0.1L, 0.01L}) {
    const Real ratio = phi(s, project(x, 1), h, t) / phi(s, x, h, t);
    CHECK(std::fabs(ratio - slope_factor) <= 1e-9L);
    // The bare factor 1 - f(tau) does not reproduce the ratio.
    CHECK(std::fabs(ratio - f.complement(tau)) > 0.5L);
  }
}
