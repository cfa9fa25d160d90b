#include "octo/slice.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "octo/error.hpp"
#include "octo/norm.hpp"

namespace octo {

namespace {

Real dot(const TowerVector& a, const TowerVector& b) {
  Real sum = 0;
  for (std::size_t i = 0; i < a.base.size(); ++i) sum += a.base[i] * b.base[i];
  for (std::size_t j = 1; j <= std::max(a.degree(), b.degree()); ++j) sum += a.coord(j) * b.coord(j);
  return sum;
}

}  // namespace

SlicePolyline slice(const TowerSpace& space, const TowerVector& u, const TowerVector& v,
                    std::size_t level, std::size_t resolution) {
  if (resolution < 3) throw Error(ErrorCode::invalid_argument, "slice resolution must be at least 3");
  if (level > space.max_level()) {
    throw Error(ErrorCode::out_of_range, "slice level exceeds schedule depth");
  }
  if (u.base.size() != space.base().dim || v.base.size() != space.base().dim) {
    throw Error(ErrorCode::dimension_mismatch, "plane vectors do not match the base dimension");
  }
  if (u.support() > level || v.support() > level) {
    throw Error(ErrorCode::invalid_argument, "plane vectors must lie in X_n for the slice level");
  }
  // Gram determinant, relative to the product of squared lengths.
  const Real uu = dot(u, u), vv = dot(v, v), uv = dot(u, v);
  if (!(uu > 0 && vv > 0) || uu * vv - uv * uv <= 1e-20L * uu * vv) {
    throw Error(ErrorCode::degenerate_plane, "slice plane is degenerate: u and v are dependent");
  }

  SlicePolyline out;
  out.u = u;
  out.v = v;
  out.level = level;
  out.resolution = resolution;
  out.points.reserve(resolution + 1);
  for (std::size_t i = 0; i <= resolution; ++i) {
    // The closing point reuses theta = 0 so the curve closes exactly.
    const std::size_t k = i == resolution ? 0 : i;
    const Real theta = 2 * std::numbers::pi_v<Real> * static_cast<Real>(k) / resolution;
    const Real c = std::cos(theta), s = std::sin(theta);
    const Real r = 1 / level_norm(space, axpy(c, u, s, v), level).value;
    SlicePoint p{theta, r, r * c, r * s};
    if (i == resolution) p.theta = 2 * std::numbers::pi_v<Real>;
    out.points.push_back(p);
  }
  return out;
}

std::string slice_to_csv(const SlicePolyline& polyline) {
  std::string out = "theta,radius,px,py\n";
  char buf[160];
  for (const SlicePoint& p : polyline.points) {
    std::snprintf(buf, sizeof buf, "%.17Lg,%.17Lg,%.17Lg,%.17Lg\n", p.theta, p.radius, p.px, p.py);
    out += buf;
  }
  return out;
}

}  // namespace octo
