#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "octo/error.hpp"
#include "octo/norm.hpp"
#include "octo/slice.hpp"
#include "test_support.hpp"

using namespace octo;
using octo::test::vec;

TEST_CASE("closed polyline at the requested resolution") {
  const TowerSpace s = TowerSpace::standard(2);
  const SlicePolyline p = slice(s, vec({1, 0}, {}), TowerVector::unit(2, 1), 1, 4);
  REQUIRE(p.points.size() == 5);
  CHECK(p.points.front().px == p.points.back().px);
  CHECK(p.points.front().py == p.points.back().py);
  CHECK(p.points.back().theta == doctest::Approx(2 * std::numbers::pi));
  CHECK(p.points[0].radius == 1);
  CHECK(p.points[1].radius == doctest::Approx(1));  // e_1 has norm 1
  const std::string csv = slice_to_csv(p);
  CHECK(csv.rfind("theta,radius,px,py\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("points lie on the unit sphere") {
  const TowerSpace s = TowerSpace::standard(2);
  const TowerVector u = vec({0.3L, -0.8L}, {0.1L, 0.4L}), v = vec({0.5L, 0.2L}, {-0.6L, 0, 0.9L});
  const SlicePolyline p = slice(s, u, v, 3, 360);
  for (const SlicePoint& q : p.points) {
    const TowerVector w = axpy(q.px, u, q.py, v);
    CHECK(std::fabs(level_norm(s, w, 3).value - 1) <= 1e-8L);
    CHECK(member_ball(s, scaled(1 - 1e-9L, w), 3));
    CHECK_FALSE(member_ball(s, scaled(1 + 1e-9L, w), 3));
  }
}

TEST_CASE("flat homothety near the base direction") {
  // With u the base unit and v = e_1, the level-1 sphere is the vertical line
  // px = 1 while |py| stays inside the flat region of f_1.
  const TowerSpace s = TowerSpace::standard(1);
  const SlicePolyline p = slice(s, vec({1}, {}), TowerVector::unit(1, 1), 1, 720);
  for (const SlicePoint& q : p.points) {
    if (q.px > 0 && std::fabs(q.py) <= 0.99L * 0.25L) CHECK(std::fabs(q.px - 1) <= 1e-15L);
  }
}

TEST_CASE("sphere sits between the diamond and its dilate") {
  const TowerSpace s = TowerSpace::standard(1);
  const Real factor = equivalence_constants(s, 2).product;
  const SlicePolyline p = slice(s, TowerVector::unit(1, 1), TowerVector::unit(1, 2), 2, 720);
  for (const SlicePoint& q : p.points) {
    const Real ell1 = std::fabs(q.px) + std::fabs(q.py);
    CHECK(ell1 >= 1 - 1e-12L);
    CHECK(ell1 <= factor + 1e-12L);
  }
}

TEST_CASE("slice errors") {
  const TowerSpace s = TowerSpace::standard(2);
  const TowerVector u = vec({1, 0}, {0.5L});
  try {
    slice(s, u, scaled(-2, u), 1, 16);
    FAIL("expected degenerate plane");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate_plane);
  }
  CHECK_THROWS_AS(slice(s, u, TowerVector::zero(2), 1, 16), Error);
  CHECK_THROWS_AS(slice(s, u, TowerVector::unit(2, 3), 2, 16), Error);
  CHECK_THROWS_AS(slice(s, u, TowerVector::unit(2, 1), 1, 2), Error);
  CHECK_THROWS_AS(slice(s, vec({1}, {}), TowerVector::unit(1, 1), 1, 8), Error);
}
