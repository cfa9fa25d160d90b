#pragma once

#include <cstddef>
#include <vector>

#include "octo/space.hpp"

namespace octo {

struct LevelSolve {
  Real lambda = 0;
  int iterations = 0;
};

/// Unique lambda >= max(u, r) with (1 - f(u/lambda)) * lambda = r.
///
/// H(lambda) = lambda * (1 - f(u/lambda)) is increasing (slope >= 1) and
/// concave, so the root lies in [max(u, (r+u)/(1+m)), r+u]. Flat and linear
/// pieces are solved in closed form; the quadratic piece and the endcap use
/// Newton iterations that converge monotonically on their piece.
LevelSolve solve_level(Real r, Real u, const ShapeFn& f, const Tolerances& tol);

struct LevelNormResult {
  Real value = 0;
  std::vector<Real> per_level;  // |||P_k x|||_k for k = 0..n
  std::vector<int> iterations;  // solver work per level, iterations[0] = 0
};

/// |||P_n x|||_n together with the trail of every lower level.
LevelNormResult level_norm(const TowerSpace& space, const TowerVector& x, std::size_t n);

/// |||x||| = sup_n |||P_n x|||_n, attained at the support of x.
Real tower_norm(const TowerSpace& space, const TowerVector& x);

/// Unit-ball membership at level n by peeling one homothety per level; uses
/// the shape functions only, never the root solver.
bool member_ball(const TowerSpace& space, const TowerVector& x, std::size_t n);

/// inf{lambda > 0 : x/lambda in B_n} by bisection on member_ball.
Real minkowski_oracle(const TowerSpace& space, const TowerVector& x, std::size_t n,
                      const Tolerances& tol);

/// |x|_n = |||P_{n-1} x|||_{n-1} + |x_n|
Real comparison_norm(const TowerSpace& space, const TowerVector& x, std::size_t n);

/// |x0| + sum_j |x_j|
Real ell1_sum_norm(const TowerSpace& space, const TowerVector& x);

struct EquivalenceConstants {
  Real product = 1;     // prod_{n<=N} (1 + (z_n + l_n)/2)
  Real tail_bound = 1;  // bound on the product of the factors beyond N
};

EquivalenceConstants equivalence_constants(const TowerSpace& space, std::size_t n);

/// Gradient of x -> |||P_m x|||_m at x^m != 0, as dual coordinates over X_m
/// (base block plus one entry per e_j). Obtained by implicit differentiation of
/// the level recurrence.
TowerVector norm_gradient(const TowerSpace& space, const TowerVector& x, std::size_t m);

/// <g, y> for dual coordinates g; y is read up to the degree of g.
Real pairing(const TowerVector& g, const TowerVector& y);

}  // namespace octo
