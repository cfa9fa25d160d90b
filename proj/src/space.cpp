#include "octo/space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "octo/error.hpp"

namespace octo {

Real BaseSpace::norm(std::span<const Real> v) const {
  Real sum = 0;
  for (Real c : v) sum += c * c;
  return std::sqrt(sum);
}

std::vector<Real> BaseSpace::gradient(std::span<const Real> v) const {
  const Real r = norm(v);
  if (r == 0) throw Error(ErrorCode::not_differentiable, "base norm is not differentiable at 0");
  std::vector<Real> g(v.begin(), v.end());
  for (Real& c : g) c /= r;
  return g;
}

std::size_t TowerVector::support() const {
  for (std::size_t j = coords.size(); j > 0; --j) {
    if (coords[j - 1] != 0) return j;
  }
  return 0;
}

bool TowerVector::is_zero() const {
  return support() == 0 && std::all_of(base.begin(), base.end(), [](Real c) { return c == 0; });
}

TowerVector TowerVector::unit(std::size_t dim, std::size_t j) {
  if (j < 1) throw Error(ErrorCode::invalid_argument, "basis index starts at 1");
  TowerVector e = zero(dim, j);
  e.coords[j - 1] = 1;
  return e;
}

TowerVector TowerVector::zero(std::size_t dim, std::size_t degree) {
  return TowerVector{std::vector<Real>(dim, 0), std::vector<Real>(degree, 0)};
}

TowerSpace::TowerSpace(BaseSpace base, ShapeSchedule schedule, Tolerances tol, std::uint64_t seed)
    : base_(base), schedule_(std::move(schedule)), tol_(tol), seed_(seed) {
  if (base_.dim < 1) throw Error(ErrorCode::invalid_argument, "base dimension must be >= 1");
  if (!(tol_.rel > 0 && tol_.rel <= 1e-6L)) {
    throw Error(ErrorCode::invalid_argument, "relative solver tolerance must lie in (0, 1e-6]");
  }
  if (tol_.max_iterations < 50) {
    throw Error(ErrorCode::invalid_argument, "solver needs at least 50 iterations");
  }
}

TowerSpace TowerSpace::standard(std::size_t dim, std::size_t levels, std::uint64_t seed) {
  return TowerSpace(BaseSpace{dim, BaseNormKind::euclidean}, ShapeSchedule::geometric(levels), {},
                    seed);
}

TowerVector project(const TowerVector& x, std::size_t n) {
  TowerVector p{x.base, std::vector<Real>(n, 0)};
  std::copy_n(x.coords.begin(), std::min(n, x.coords.size()), p.coords.begin());
  return p;
}

bool same_point(const TowerVector& a, const TowerVector& b) {
  if (a.base != b.base) return false;
  const std::size_t n = std::max(a.degree(), b.degree());
  for (std::size_t j = 1; j <= n; ++j) {
    if (a.coord(j) != b.coord(j)) return false;
  }
  return true;
}

Real ell1_tail(const TowerVector& x, std::size_t n) {
  Real sum = 0;
  for (std::size_t j = n; j < x.coords.size(); ++j) sum += std::fabs(x.coords[j]);
  return sum;
}

TowerVector axpy(Real a, const TowerVector& x, Real b, const TowerVector& y) {
  if (x.base.size() != y.base.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "base dimensions differ: " + std::to_string(x.base.size()) + " vs " +
                    std::to_string(y.base.size()));
  }
  TowerVector r = TowerVector::zero(x.base.size(), std::max(x.degree(), y.degree()));
  for (std::size_t i = 0; i < r.base.size(); ++i) r.base[i] = a * x.base[i] + b * y.base[i];
  for (std::size_t j = 1; j <= r.degree(); ++j) r.coords[j - 1] = a * x.coord(j) + b * y.coord(j);
  return r;
}

TowerVector scaled(Real a, const TowerVector& x) {
  TowerVector r = x;
  for (Real& c : r.base) c *= a;
  for (Real& c : r.coords) c *= a;
  return r;
}

}  // namespace octo
