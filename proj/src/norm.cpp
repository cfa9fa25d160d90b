#include "octo/norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "octo/error.hpp"

namespace octo {
namespace {

void check_level(const TowerSpace& space, std::size_t n) {
  if (n > space.max_level()) {
    throw Error(ErrorCode::out_of_range, "level " + std::to_string(n) + " exceeds schedule depth " +
                                             std::to_string(space.max_level()));
  }
}

// Tests x/lambda in B_n without forming x/lambda.
bool member_scaled(const TowerSpace& space, const TowerVector& x, std::size_t n, Real lambda) {
  Real scale = lambda;
  for (std::size_t k = n; k >= 1; --k) {
    const Real height = std::fabs(x.coord(k)) / scale;
    if (height > 1) return false;
    const Real factor = space.schedule().shape(k).complement(height);
    if (factor == 0) {
      // The slice at height 1 is the single point e_k.
      for (std::size_t j = 1; j < k; ++j) {
        if (x.coord(j) != 0) return false;
      }
      return std::all_of(x.base.begin(), x.base.end(), [](Real c) { return c == 0; });
    }
    scale *= factor;
  }
  return space.base().norm(x.base) <= scale;
}

}  // namespace

LevelSolve solve_level(Real r, Real u, const ShapeFn& f, const Tolerances& tol) {
  if (!(r >= 0) || !(u >= 0) || !std::isfinite(r) || !std::isfinite(u)) {
    throw Error(ErrorCode::invalid_argument, "solve_level needs finite r, u >= 0");
  }
  if (u == 0) return {r, 0};
  if (r == 0) return {u, 0};

  // H(lambda) = lambda * (1 - f(u/lambda)) is increasing and concave. Locate the
  // piece of f that holds the root by evaluating H where u/lambda crosses z, l, s.
  auto H = [&](Real lambda) { return lambda * f.complement(std::min<Real>(u / lambda, 1)); };

  if (u <= f.z * r) return {r, 0};

  if (r >= H(u / f.l)) {
    // Quadratic piece, lambda in [u/l, u/z]. Newton from the left end of a
    // concave increasing function climbs monotonically to the root.
    Real lambda = u / f.l;
    const Real upper = u / f.z;
    for (int it = 1; it <= tol.max_iterations; ++it) {
      const Real t = u / lambda;
      const Real slope = f.complement(t) + t * f.derivative(t);
      const Real next = std::min(upper, lambda - (H(lambda) - r) / slope);
      const Real step = next - lambda;
      lambda = next;
      if (step <= tol.rel * lambda) return {lambda, it};
    }
    throw Error(ErrorCode::not_converged, "level solver (quadratic piece) did not converge at level " +
                                              std::to_string(f.level));
  }

  if (r >= H(u / f.s)) return {(r + u) / (1 + f.m), 0};

  // Endcap, lambda in (u, u/s]. With w = lambda - u the equation reads
  //   alpha ln w + (1 - alpha) ln(u + w) = ln(r / c),
  // which in s = ln w is convex with slope in [alpha, 1]; Newton from the right
  // end decreases monotonically to the root.
  const Real target = std::log(r / f.c);
  Real s = std::log(u / f.s - u);
  for (int it = 1; it <= tol.max_iterations; ++it) {
    const Real w = std::exp(s);
    const Real value = f.alpha * s + (1 - f.alpha) * std::log(u + w) - target;
    const Real slope = f.alpha + (1 - f.alpha) * w / (u + w);
    const Real step = value / slope;
    s -= step;
    if (std::fabs(step) * w <= tol.rel * (u + w)) return {u + std::exp(s), it};
  }
  throw Error(ErrorCode::not_converged,
              "level solver (endcap) did not converge at level " + std::to_string(f.level));
}

LevelNormResult level_norm(const TowerSpace& space, const TowerVector& x, std::size_t n) {
  check_level(space, n);
  if (x.base.size() != space.base().dim) {
    throw Error(ErrorCode::dimension_mismatch, "vector base dimension does not match the space");
  }
  LevelNormResult result;
  result.per_level.reserve(n + 1);
  result.iterations.reserve(n + 1);
  result.per_level.push_back(space.base().norm(x.base));
  result.iterations.push_back(0);
  for (std::size_t k = 1; k <= n; ++k) {
    const LevelSolve step = solve_level(result.per_level.back(), std::fabs(x.coord(k)),
                                        space.schedule().shape(k), space.tol());
    result.per_level.push_back(step.lambda);
    result.iterations.push_back(step.iterations);
  }
  result.value = result.per_level.back();
  return result;
}

Real tower_norm(const TowerSpace& space, const TowerVector& x) {
  return level_norm(space, x, x.support()).value;
}

bool member_ball(const TowerSpace& space, const TowerVector& x, std::size_t n) {
  check_level(space, n);
  return member_scaled(space, x, n, 1);
}

Real minkowski_oracle(const TowerSpace& space, const TowerVector& x, std::size_t n,
                      const Tolerances& tol) {
  check_level(space, n);
  const TowerVector p = project(x, n);
  if (p.is_zero()) return 0;

  const Real sum_norm = ell1_sum_norm(space, p);
  Real hi = sum_norm;
  Real lo = sum_norm / equivalence_constants(space, n).product;
  const int budget = std::max(tol.max_iterations, 200);
  int it = 0;
  while (!member_scaled(space, p, n, hi)) {
    hi *= 2;
    if (++it > budget) throw Error(ErrorCode::not_converged, "oracle could not bracket from above");
  }
  while (member_scaled(space, p, n, lo)) {
    lo /= 2;
    if (++it > budget) throw Error(ErrorCode::not_converged, "oracle could not bracket from below");
  }
  for (; it <= budget; ++it) {
    const Real mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi || hi - lo <= tol.rel * hi) return hi;
    if (member_scaled(space, p, n, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  throw Error(ErrorCode::not_converged, "oracle bisection exhausted its iteration budget");
}

Real comparison_norm(const TowerSpace& space, const TowerVector& x, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "comparison norm is defined for n >= 1");
  check_level(space, n);
  return level_norm(space, x, n - 1).value + std::fabs(x.coord(n));
}

Real ell1_sum_norm(const TowerSpace& space, const TowerVector& x) {
  return space.base().norm(x.base) + ell1_tail(x, 0);
}

EquivalenceConstants equivalence_constants(const TowerSpace& space, std::size_t n) {
  check_level(space, n);
  const ShapeSchedule& schedule = space.schedule();
  EquivalenceConstants out;
  for (std::size_t k = 1; k <= n; ++k) out.product *= 1 + schedule.offset(k);

  if (schedule.kind() == ScheduleKind::default_geometric) {
    // sum_{k>n} (z_k + l_k)/2 in closed form, and prod(1 + a_k) <= exp(sum a_k).
    const GeometricParams& p = schedule.params();
    const Real next = static_cast<Real>(n + 1);
    const Real tail_sum = (std::pow(p.z_ratio, next) / (1 - p.z_ratio) +
                           std::pow(p.l_ratio, next) / (1 - p.l_ratio)) /
                          2;
    out.tail_bound = std::exp(tail_sum);
  } else {
    // An explicit schedule ends at its last level; the omitted factors are exact.
    for (std::size_t k = n + 1; k <= schedule.levels(); ++k) out.tail_bound *= 1 + schedule.offset(k);
  }
  return out;
}

TowerVector norm_gradient(const TowerSpace& space, const TowerVector& x, std::size_t m) {
  const LevelNormResult trail = level_norm(space, x, m);
  if (trail.value == 0) throw Error(ErrorCode::invalid_argument, "gradient undefined at x^m = 0");

  // d lambda_k / d lambda_{k-1} and d lambda_k / d|x_k| from the implicit equation
  // lambda * (1 - f(u/lambda)) = r.
  std::vector<Real> d_lower(m + 1, 1), d_height(m + 1, 0);
  for (std::size_t k = 1; k <= m; ++k) {
    const Real r = trail.per_level[k - 1];
    const Real u = std::fabs(x.coord(k));
    const Real lambda = trail.per_level[k];
    if (u == 0) continue;
    const Real t = u / lambda;
    if (r == 0 || t >= 1) {
      d_lower[k] = 0;
      d_height[k] = 1;
      continue;
    }
    const ShapeFn& f = space.schedule().shape(k);
    const Real slope = f.derivative(t);
    const Real denom = f.complement(t) + t * slope;
    d_lower[k] = 1 / denom;
    d_height[k] = slope / denom;
  }

  TowerVector g = TowerVector::zero(x.base.size(), m);
  Real chain = 1;
  for (std::size_t k = m; k >= 1; --k) {
    const Real xk = x.coord(k);
    if (xk != 0) g.coords[k - 1] = std::copysign(d_height[k], xk) * chain;
    chain *= d_lower[k];
  }
  if (trail.per_level[0] > 0 && chain != 0) {
    const std::vector<Real> base_grad = space.base().gradient(x.base);
    for (std::size_t i = 0; i < base_grad.size(); ++i) g.base[i] = base_grad[i] * chain;
  }
  return g;
}

Real pairing(const TowerVector& g, const TowerVector& y) {
  if (g.base.size() != y.base.size()) {
    throw Error(ErrorCode::dimension_mismatch, "pairing across different base dimensions");
  }
  Real sum = 0;
  for (std::size_t i = 0; i < g.base.size(); ++i) sum += g.base[i] * y.base[i];
  for (std::size_t j = 1; j <= g.degree(); ++j) sum += g.coords[j - 1] * y.coord(j);
  return sum;
}

}  // namespace octo
