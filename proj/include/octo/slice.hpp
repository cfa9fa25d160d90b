#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "octo/space.hpp"

namespace octo {

struct SlicePoint {
  Real theta = 0;
  Real radius = 0;  // 1 / |||cos(theta) u + sin(theta) v|||_n
  Real px = 0;      // radius cos(theta)
  Real py = 0;      // radius sin(theta)
};

/// The unit sphere of level n cut by span{u, v}, in the (u, v) coefficient plane.
struct SlicePolyline {
  TowerVector u, v;
  std::size_t level = 0;
  std::size_t resolution = 0;
  /// theta_i = 2 pi i / resolution for i = 0..resolution; the last point repeats the first.
  std::vector<SlicePoint> points;
};

/// Throws ErrorCode::degenerate_plane when u and v are linearly dependent in X_n.
SlicePolyline slice(const TowerSpace& space, const TowerVector& u, const TowerVector& v,
                    std::size_t level, std::size_t resolution);

/// Header "theta,radius,px,py" followed by one row per point.
std::string slice_to_csv(const SlicePolyline& polyline);

}  // namespace octo
