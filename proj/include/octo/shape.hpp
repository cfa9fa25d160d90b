#pragma once

#include <cstddef>
#include <vector>

namespace octo {

/// Extended precision is used for every internal evaluation. Difference
/// quotients of the tower norm at steps near 2^-34 need more than 53 bits.
using Real = long double;

enum class ScheduleKind { explicit_list, default_geometric };

/// z_n = z_ratio^n, l_n = l_ratio^n, s_n = 1 - s_scale * s_ratio^n.
/// Summability of l_n follows from l_ratio < 1.
struct GeometricParams {
  Real z_ratio = 0.25L;
  Real l_ratio = 0.5L;
  Real s_scale = 0.5L;
  Real s_ratio = 0.5L;
};

/// One level of the piecewise profile: zero, quadratic, linear, power endcap.
struct ShapeFn {
  std::size_t level = 0;
  Real z = 0, l = 0, s = 0;
  Real m = 0;      // (z + l) / 2, offset of the linear piece
  Real v = 0;      // value at s
  Real alpha = 0;  // endcap exponent
  Real c = 0;      // endcap coefficient

  static ShapeFn from_breakpoints(std::size_t level, Real z, Real l, Real s);

  Real value(Real t) const;
  /// 1 - value(t), evaluated without cancellation on the endcap.
  Real complement(Real t) const;
  /// Throws ErrorCode::not_differentiable at t = 1, where the slope is infinite.
  Real derivative(Real t) const;
};

class ShapeSchedule {
 public:
  static ShapeSchedule geometric(std::size_t levels, const GeometricParams& params = {});
  static ShapeSchedule explicit_list(std::vector<Real> z, std::vector<Real> l, std::vector<Real> s);

  std::size_t levels() const { return z_.size(); }
  ScheduleKind kind() const { return kind_; }
  const GeometricParams& params() const { return params_; }

  /// Levels are 1-based, as in x = x0 + sum_{n>=1} x_n e_n.
  const ShapeFn& shape(std::size_t n) const;
  Real z(std::size_t n) const { return shape(n).z; }
  Real l(std::size_t n) const { return shape(n).l; }
  Real s(std::size_t n) const { return shape(n).s; }
  /// (z_n + l_n) / 2
  Real offset(std::size_t n) const { return shape(n).m; }

  const std::vector<Real>& z_values() const { return z_; }
  const std::vector<Real>& l_values() const { return l_; }
  const std::vector<Real>& s_values() const { return s_; }

 private:
  ShapeSchedule(ScheduleKind kind, GeometricParams params, std::vector<Real> z, std::vector<Real> l,
                std::vector<Real> s);

  ScheduleKind kind_;
  GeometricParams params_;
  std::vector<Real> z_, l_, s_;
  std::vector<ShapeFn> shapes_;
};

/// Largest number of levels a schedule may carry.
inline constexpr std::size_t kMaxLevels = 64;

/// max over a uniform grid on [0,1] of max(f(t) - t, (t - m) - f(t), -f(t)).
/// Non-positive (up to rounding) for a correctly built profile.
Real sandwich_violation(const ShapeFn& f, std::size_t grid_size);

/// Largest value or slope mismatch across the three breakpoints.
Real junction_mismatch(const ShapeFn& f);

}  // namespace octo
