#include <cmath>
#include <string>

#include "octo/error.hpp"
#include "octo/norm.hpp"
#include "octo/space.hpp"
#include "rng.hpp"

namespace octo {

TowerVector random_vector(const TowerSpace& space, std::size_t degree, SampleStyle style,
                          std::uint64_t seed, const SampleParams& params) {
  if (degree > space.max_level()) {
    throw Error(ErrorCode::out_of_range, "sample degree " + std::to_string(degree) +
                                             " exceeds schedule depth " +
                                             std::to_string(space.max_level()));
  }
  detail::Rng rng(seed);
  TowerVector x = TowerVector::zero(space.base().dim, degree);

  switch (style) {
    case SampleStyle::generic:
    case SampleStyle::unit_sphere_level_n: {
      for (Real& c : x.base) c = rng.uniform(-params.bound, params.bound);
      for (Real& c : x.coords) c = rng.uniform(-params.bound, params.bound);
      break;
    }
    case SampleStyle::summable_tail: {
      for (Real& c : x.base) c = rng.uniform(-params.bound, params.bound);
      Real envelope = params.tail_constant;
      for (Real& c : x.coords) {
        envelope /= 3;
        c = envelope * rng.uniform(-1, 1);
      }
      break;
    }
  }

  if (style == SampleStyle::unit_sphere_level_n) {
    const std::size_t level = params.level == 0 ? degree : params.level;
    if (level > space.max_level()) {
      throw Error(ErrorCode::out_of_range, "normalization level exceeds schedule depth");
    }
    Real value = level_norm(space, x, level).value;
    if (value == 0) {
      // Degenerate draw; fall back to a base direction, which has norm 1 at every level.
      x.base.assign(x.base.size(), 0);
      x.base[0] = 1;
      value = level_norm(space, x, level).value;
    }
    x = scaled(1 / value, x);
  }
  return x;
}

}  // namespace octo
