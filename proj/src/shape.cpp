#include "octo/shape.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "octo/error.hpp"

namespace octo {
namespace {

[[noreturn]] void schedule_error(std::size_t index, const std::string& constraint) {
  std::ostringstream msg;
  msg << "schedule invalid at level " << index << ": " << constraint;
  throw Error(ErrorCode::schedule_invalid, msg.str());
}

void check_unit_argument(Real t) {
  if (!(t >= 0 && t <= 1)) {
    std::ostringstream msg;
    msg << "shape argument " << static_cast<double>(t) << " outside [0,1]";
    throw Error(ErrorCode::invalid_argument, msg.str());
  }
}

}  // namespace

ShapeFn ShapeFn::from_breakpoints(std::size_t level, Real z, Real l, Real s) {
  ShapeFn f;
  f.level = level;
  f.z = z;
  f.l = l;
  f.s = s;
  f.m = (z + l) / 2;
  f.v = s - f.m;
  f.alpha = (1 - s) / (1 - f.v);
  f.c = (1 - f.v) / std::pow(1 - s, f.alpha);
  return f;
}

Real ShapeFn::value(Real t) const {
  check_unit_argument(t);
  if (t <= z) return 0;
  if (t < l) return (t - z) * (t - z) / (2 * (l - z));
  if (t <= s) return t - m;
  if (t == 1) return 1;
  return 1 - c * std::pow(1 - t, alpha);
}

Real ShapeFn::complement(Real t) const {
  check_unit_argument(t);
  if (t <= s) return 1 - value(t);
  if (t == 1) return 0;
  return c * std::pow(1 - t, alpha);
}

Real ShapeFn::derivative(Real t) const {
  check_unit_argument(t);
  if (t == 1) {
    throw Error(ErrorCode::not_differentiable, "shape slope is infinite at t = 1");
  }
  if (t <= z) return 0;
  if (t < l) return (t - z) / (l - z);
  if (t <= s) return 1;
  return c * alpha * std::pow(1 - t, alpha - 1);
}

ShapeSchedule::ShapeSchedule(ScheduleKind kind, GeometricParams params, std::vector<Real> z,
                             std::vector<Real> l, std::vector<Real> s)
    : kind_(kind), params_(params), z_(std::move(z)), l_(std::move(l)), s_(std::move(s)) {
  if (z_.empty()) throw Error(ErrorCode::schedule_invalid, "schedule needs at least one level");
  if (z_.size() != l_.size() || z_.size() != s_.size()) {
    throw Error(ErrorCode::schedule_invalid, "z, l and s must have the same length");
  }
  if (z_.size() > kMaxLevels) {
    throw Error(ErrorCode::schedule_invalid,
                "schedule exceeds " + std::to_string(kMaxLevels) + " levels");
  }
  for (std::size_t i = 0; i < z_.size(); ++i) {
    const std::size_t n = i + 1;
    if (!(z_[i] > 0)) schedule_error(n, "requires 0 < z");
    if (!(z_[i] < l_[i])) schedule_error(n, "requires z < l");
    if (!(l_[i] < s_[i])) schedule_error(n, "requires l < s");
    if (!(s_[i] < 1)) schedule_error(n, "requires s < 1");
    if (i > 0) {
      if (!(z_[i] < z_[i - 1])) schedule_error(n, "z must be strictly decreasing");
      if (!(l_[i] < l_[i - 1])) schedule_error(n, "l must be strictly decreasing");
      if (!(s_[i] > s_[i - 1])) schedule_error(n, "s must be strictly increasing");
    }
  }
  shapes_.reserve(z_.size());
  for (std::size_t i = 0; i < z_.size(); ++i) {
    shapes_.push_back(ShapeFn::from_breakpoints(i + 1, z_[i], l_[i], s_[i]));
  }
}

ShapeSchedule ShapeSchedule::geometric(std::size_t levels, const GeometricParams& p) {
  if (levels < 1) throw Error(ErrorCode::schedule_invalid, "levels must be >= 1");
  if (!(p.z_ratio > 0 && p.z_ratio < p.l_ratio && p.l_ratio < 1)) {
    throw Error(ErrorCode::schedule_invalid, "geometric ratios require 0 < z_ratio < l_ratio < 1");
  }
  if (!(p.s_scale > 0 && p.s_scale < 1 && p.s_ratio > 0 && p.s_ratio < 1)) {
    throw Error(ErrorCode::schedule_invalid, "geometric s parameters must lie in (0,1)");
  }
  std::vector<Real> z(levels), l(levels), s(levels);
  for (std::size_t i = 0; i < levels; ++i) {
    const Real n = static_cast<Real>(i + 1);
    z[i] = std::pow(p.z_ratio, n);
    l[i] = std::pow(p.l_ratio, n);
    s[i] = 1 - p.s_scale * std::pow(p.s_ratio, n);
  }
  return ShapeSchedule(ScheduleKind::default_geometric, p, std::move(z), std::move(l), std::move(s));
}

ShapeSchedule ShapeSchedule::explicit_list(std::vector<Real> z, std::vector<Real> l,
                                           std::vector<Real> s) {
  return ShapeSchedule(ScheduleKind::explicit_list, GeometricParams{}, std::move(z), std::move(l),
                       std::move(s));
}

const ShapeFn& ShapeSchedule::shape(std::size_t n) const {
  if (n < 1 || n > shapes_.size()) {
    throw Error(ErrorCode::out_of_range, "level " + std::to_string(n) + " outside schedule 1.." +
                                             std::to_string(shapes_.size()));
  }
  return shapes_[n - 1];
}

Real sandwich_violation(const ShapeFn& f, std::size_t grid_size) {
  if (grid_size < 2) throw Error(ErrorCode::invalid_argument, "grid_size must be >= 2");
  Real worst = -1;
  for (std::size_t i = 0; i < grid_size; ++i) {
    const Real t = static_cast<Real>(i) / static_cast<Real>(grid_size - 1);
    const Real ft = f.value(t);
    worst = std::max({worst, ft - t, (t - f.m) - ft, -ft});
  }
  return worst;
}

Real junction_mismatch(const ShapeFn& f) {
  // Closed forms of the neighbouring pieces at each breakpoint. At z and at l
  // the quadratic meets value 0 / slope 0 and slope 1 by construction.
  const Real quad_at_l = (f.l - f.z) / 2;
  const Real lin_at_l = f.l - f.m;
  const Real lin_at_s = f.s - f.m;
  const Real cap_at_s = 1 - f.c * std::pow(1 - f.s, f.alpha);
  const Real cap_slope_at_s = f.c * f.alpha * std::pow(1 - f.s, f.alpha - 1);
  return std::max({std::fabs(quad_at_l - lin_at_l), std::fabs(lin_at_s - cap_at_s),
                   std::fabs(cap_slope_at_s - 1)});
}

}  // namespace octo
