#pragma once

#include <cstddef>
#include <vector>

#include "octo/norm.hpp"
#include "octo/space.hpp"

namespace octo {

/// phi_{x,h}(t) = |||x + t h||| - |||x|||
Real phi(const TowerSpace& space, const TowerVector& x, const TowerVector& h, Real t);

/// phi restricted to level n: |||P_n(x + t h)|||_n - |||P_n x|||_n.
Real phi_at_level(const TowerSpace& space, const TowerVector& x, const TowerVector& h, Real t,
                  std::size_t n);

struct DerivativeStep {
  Real t = 0;
  Real quotient = 0;
};

struct DerivativeEstimate {
  Real right = 0;
  Real left = 0;
  /// Right-side steps t0 2^-k for k = 0..K, then the left side -t0 2^-k; |t|
  /// strictly decreases within each side.
  std::vector<DerivativeStep> steps;
  bool gateaux = false;
  Real tol_used = 0;
};

struct StepSchedule {
  Real t0 = 0.0625L;
  int halvings = 30;
  Real tol = 1e-6L;
};

/// One-sided quotients phi(t)/t on geometric steps, each side extrapolated
/// with two rounds of Richardson over its last three quotients.
DerivativeEstimate directional_derivative(const TowerSpace& space, const TowerVector& x,
                                          const TowerVector& h, const StepSchedule& steps = {});

/// Largest deviation among
///   phi_{x,tau h}(t) = phi_{x,h}(tau t),
///   phi_{tau x,tau h}(t) = tau phi_{x,h}(t),
///   phi_{tau x,h}(t) = tau phi_{x,h}(t/tau),
/// each measured relative to max(1, |rhs|).
Real phi_identities_violation(const TowerSpace& space, const TowerVector& x, const TowerVector& h,
                              Real tau, Real t);

/// Coordinates of the norming functional g_m of x^m in X_m.
TowerVector norming_functional(const TowerSpace& space, const TowerVector& x, std::size_t m);

struct TangentDecomposition {
  std::size_t m = 0;
  TowerVector g;          // norming functional of x^m
  Real C = 0;             // h = h_tangent + C x^m
  TowerVector h_tangent;  // tangent part, <g, h_tangent> = 0
};

TangentDecomposition tangent_decomposition(const TowerSpace& space, const TowerVector& x,
                                           const TowerVector& h, std::size_t m);

/// Symmetric log grid +-2^-k, k = 0..16.
std::vector<Real> symmetric_log_grid(Real largest = 1, int count = 17);

/// |||x + t h||| >= |||x||| certified by a grid check plus a vanishing
/// derivative at 0; convexity makes the two together sufficient.
bool is_bj_orthogonal(const TowerSpace& space, const TowerVector& x, const TowerVector& h,
                      Real tol = 1e-6L);

/// (|||x + t h||| + |||x - t h||| - 2 |||x|||) / t, nonnegative by convexity.
Real symmetric_quotient(const TowerSpace& space, const TowerVector& x, const TowerVector& h,
                        Real t);

}  // namespace octo
