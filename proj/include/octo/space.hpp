#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "octo/shape.hpp"

namespace octo {

enum class BaseNormKind { euclidean };

/// The finite-dimensional base space X0 carrying a Gateaux-smooth norm.
struct BaseSpace {
  std::size_t dim = 1;
  BaseNormKind kind = BaseNormKind::euclidean;

  Real norm(std::span<const Real> v) const;
  /// Gradient of the base norm at v != 0 (x0 / |x0| for the Euclidean norm).
  std::vector<Real> gradient(std::span<const Real> v) const;
};

/// A point of X_N: base component x0 plus the first N coordinates along e_1..e_N.
struct TowerVector {
  std::vector<Real> base;
  std::vector<Real> coords;

  std::size_t degree() const { return coords.size(); }
  /// Index of the last nonzero coordinate (0 when the vector lies in X0).
  std::size_t support() const;
  bool is_zero() const;

  /// The basis vector e_j (j >= 1) over a base of dimension dim.
  static TowerVector unit(std::size_t dim, std::size_t j);
  static TowerVector zero(std::size_t dim, std::size_t degree = 0);

  /// Coordinate x_j for j >= 1; zero beyond the stored degree.
  Real coord(std::size_t j) const { return (j >= 1 && j <= coords.size()) ? coords[j - 1] : 0; }

  friend bool operator==(const TowerVector&, const TowerVector&) = default;
};

struct Tolerances {
  Real rel = 1e-12L;
  int max_iterations = 200;
};

/// The renormed space: base space, shape schedule and solver tolerances.
class TowerSpace {
 public:
  TowerSpace(BaseSpace base, ShapeSchedule schedule, Tolerances tol = {}, std::uint64_t seed = 0);

  const BaseSpace& base() const { return base_; }
  const ShapeSchedule& schedule() const { return schedule_; }
  const Tolerances& tol() const { return tol_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t max_level() const { return schedule_.levels(); }

  /// Default geometric schedule over Euclidean R^dim.
  static TowerSpace standard(std::size_t dim, std::size_t levels = 40, std::uint64_t seed = 0);

 private:
  BaseSpace base_;
  ShapeSchedule schedule_;
  Tolerances tol_;
  std::uint64_t seed_;
};

/// P_n: same base, coordinates truncated or zero-padded to length n.
TowerVector project(const TowerVector& x, std::size_t n);

/// Equality as points of X: coordinates compared up to zero padding.
bool same_point(const TowerVector& a, const TowerVector& b);

/// sum_{j>n} |x_j|
Real ell1_tail(const TowerVector& x, std::size_t n);

/// a*x + b*y, with degree max(deg x, deg y).
TowerVector axpy(Real a, const TowerVector& x, Real b, const TowerVector& y);

TowerVector scaled(Real a, const TowerVector& x);

enum class SampleStyle { generic, unit_sphere_level_n, summable_tail };

struct SampleParams {
  /// Coordinates are drawn uniformly from [-bound, bound].
  Real bound = 1;
  /// Level at which unit_sphere_level_n normalizes; defaults to the degree.
  std::size_t level = 0;
  /// Envelope constant C in |x_j| <= C 3^-j for summable_tail.
  Real tail_constant = 1;
};

/// Deterministic in (space, degree, style, seed).
TowerVector random_vector(const TowerSpace& space, std::size_t degree, SampleStyle style,
                          std::uint64_t seed, const SampleParams& params = {});

}  // namespace octo
