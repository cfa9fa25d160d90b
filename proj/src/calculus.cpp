#include "octo/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "octo/error.hpp"

namespace octo {

Real phi(const TowerSpace& space, const TowerVector& x, const TowerVector& h, Real t) {
  return tower_norm(space, axpy(1, x, t, h)) - tower_norm(space, x);
}

Real phi_at_level(const TowerSpace& space, const TowerVector& x, const TowerVector& h, Real t,
                  std::size_t n) {
  return level_norm(space, axpy(1, x, t, h), n).value - level_norm(space, x, n).value;
}

namespace {

// Two Richardson rounds over quotients at steps t, t/2, t/4 with error
// expansion a1 t + a2 t^2 + ...
Real richardson(Real q0, Real q1, Real q2) {
  const Real r0 = 2 * q1 - q0;
  const Real r1 = 2 * q2 - q1;
  return (4 * r1 - r0) / 3;
}

}  // namespace

DerivativeEstimate directional_derivative(const TowerSpace& space, const TowerVector& x,
                                          const TowerVector& h, const StepSchedule& schedule) {
  if (x.is_zero()) {
    throw Error(ErrorCode::not_differentiable, "the norm is not differentiable at the origin");
  }
  if (schedule.halvings < 2 || !(schedule.t0 > 0)) {
    throw Error(ErrorCode::invalid_argument, "derivative needs t0 > 0 and at least 2 halvings");
  }
  const Real base = tower_norm(space, x);
  DerivativeEstimate est;
  est.tol_used = schedule.tol;
  est.steps.reserve(2 * static_cast<std::size_t>(schedule.halvings + 1));

  auto side = [&](Real sign) {
    std::vector<Real> q;
    Real t = sign * schedule.t0;
    for (int k = 0; k <= schedule.halvings; ++k, t /= 2) {
      const Real quotient = (tower_norm(space, axpy(1, x, t, h)) - base) / t;
      est.steps.push_back({t, quotient});
      q.push_back(quotient);
    }
    const std::size_t n = q.size();
    return richardson(q[n - 3], q[n - 2], q[n - 1]);
  };
  est.right = side(1);
  est.left = side(-1);
  est.gateaux = std::fabs(est.right - est.left) <= est.tol_used;
  return est;
}

Real phi_identities_violation(const TowerSpace& space, const TowerVector& x, const TowerVector& h,
                              Real tau, Real t) {
  if (!(tau > 0)) throw Error(ErrorCode::invalid_argument, "identity check needs tau > 0");
  const TowerVector tau_x = scaled(tau, x);
  const TowerVector tau_h = scaled(tau, h);
  auto rel = [](Real lhs, Real rhs) { return std::fabs(lhs - rhs) / std::max<Real>(1, std::fabs(rhs)); };

  const Real direction = rel(phi(space, x, tau_h, t), phi(space, x, h, tau * t));
  const Real joint = rel(phi(space, tau_x, tau_h, t), tau * phi(space, x, h, t));
  const Real point = rel(phi(space, tau_x, h, t), tau * phi(space, x, h, t / tau));
  return std::max({direction, joint, point});
}

TowerVector norming_functional(const TowerSpace& space, const TowerVector& x, std::size_t m) {
  if (project(x, m).is_zero()) {
    throw Error(ErrorCode::invalid_argument, "norming functional needs x^m != 0");
  }
  return norm_gradient(space, x, m);
}

TangentDecomposition tangent_decomposition(const TowerSpace& space, const TowerVector& x,
                                           const TowerVector& h, std::size_t m) {
  if (h.support() > m) {
    throw Error(ErrorCode::invalid_argument, "direction must lie in X_m for the decomposition");
  }
  TangentDecomposition out;
  out.m = m;
  out.g = norming_functional(space, x, m);
  const TowerVector xm = project(x, m);
  out.C = pairing(out.g, h) / level_norm(space, x, m).value;
  out.h_tangent = axpy(1, project(h, m), -out.C, xm);
  return out;
}

std::vector<Real> symmetric_log_grid(Real largest, int count) {
  std::vector<Real> grid;
  grid.reserve(2 * static_cast<std::size_t>(count));
  Real t = largest;
  for (int k = 0; k < count; ++k, t /= 2) {
    grid.push_back(t);
    grid.push_back(-t);
  }
  return grid;
}

bool is_bj_orthogonal(const TowerSpace& space, const TowerVector& x, const TowerVector& h, Real tol) {
  if (x.is_zero() || h.is_zero()) {
    throw Error(ErrorCode::invalid_argument, "orthogonality needs nonzero x and h");
  }
  for (Real t : symmetric_log_grid()) {
    if (phi(space, x, h, t) < -tol) return false;
  }
  StepSchedule steps;
  steps.tol = tol;
  const DerivativeEstimate d = directional_derivative(space, x, h, steps);
  return std::fabs(d.right) <= tol && std::fabs(d.left) <= tol;
}

Real symmetric_quotient(const TowerSpace& space, const TowerVector& x, const TowerVector& h,
                        Real t) {
  if (!(t > 0)) throw Error(ErrorCode::invalid_argument, "symmetric quotient needs t > 0");
  const Real plus = tower_norm(space, axpy(1, x, t, h));
  const Real minus = tower_norm(space, axpy(1, x, -t, h));
  return (plus + minus - 2 * tower_norm(space, x)) / t;
}

}  // namespace octo
