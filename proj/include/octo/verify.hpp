#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "octo/space.hpp"

namespace octo {

struct VerifyOptions {
  /// 0 selects the check's default sample count.
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  /// Replaces every additive tolerance of a check when set. Fixed thresholds
  /// (decay targets, fixed constants) are not affected.
  std::optional<Real> tol;
  /// Octahedrality target.
  Real epsilon = 0.1L;
  std::size_t max_degree = 8;
};

/// One inequality family inside a check.
struct SubCheck {
  std::string name;
  std::size_t evaluations = 0;
  std::size_t violations = 0;
  Real worst_violation = -INFINITY;  // largest (lhs - rhs) seen, before tolerance
  Real tolerance = 0;
  nlohmann::json worst_witness;
};

struct VerificationReport {
  std::string check_name;
  std::size_t samples = 0;
  std::size_t violations = 0;
  Real worst_violation = -INFINITY;
  nlohmann::json worst_witness;
  Real tolerance = 0;
  bool passed = false;
  std::int64_t runtime_ms = 0;
  std::vector<SubCheck> sub_checks;
  nlohmann::json details = nlohmann::json::object();
};

/// Per-level data of one Case-2 sample.
struct Case2Trace {
  std::size_t n = 0, k = 0;
  std::vector<Real> C_sequence;  // C_n .. C_{n+k}
  std::vector<Real> h_gaps;      // |||h_{j+1} - h_j|||
  std::vector<Real> E_values;    // E_j(t) at the trace step t
  Real t = 0;
  Real lhs = 0, rhs = 0;         // final estimate at (n, k, t)
};

/// Shape profiles: sandwich, C1 junctions, convexity, endpoint values.
VerificationReport verify_shape(const TowerSpace& space, const VerifyOptions& options = {});
/// Projection monotonicity, flat-region invariance, oracle agreement and norm axioms.
VerificationReport verify_structure(const TowerSpace& space, const VerifyOptions& options = {});
/// (|x0| + ||x||_1) / product <= |||x||| <= |x0| + ||x||_1, and the per-level sandwich.
VerificationReport verify_equivalence(const TowerSpace& space, const VerifyOptions& options = {});
/// |||y + a e_n||| >= (1 - eps)(|||y||| + |a|) for y in X_{n-1}, n >= n0(eps).
VerificationReport verify_octahedral(const TowerSpace& space, const VerifyOptions& options = {});
/// Tangent case: ratio inequality, telescoped bound, inherited orthogonality.
VerificationReport verify_case1(const TowerSpace& space, const VerifyOptions& options = {});
/// General case: C_m bounds, tangent-part increments, error terms, final estimate.
VerificationReport verify_case2(const TowerSpace& space, const VerifyOptions& options = {});
/// Decay of symmetric quotients and two-sided derivatives at Y points and deep truncations.
VerificationReport verify_smoothness(const TowerSpace& space, const VerifyOptions& options = {});

/// Smallest n with (z_n + l_n) / (z_n + l_n + 2) <= eps; throws when no level qualifies.
std::size_t octahedral_start_level(const TowerSpace& space, Real epsilon);

const std::vector<std::string>& check_names();

/// Runs one named check; throws ErrorCode::invalid_argument for unknown names.
VerificationReport run_check(const std::string& name, const TowerSpace& space,
                             const VerifyOptions& options = {});

/// Every check in check_names() order.
std::vector<VerificationReport> run_all(const TowerSpace& space, const VerifyOptions& options = {});

nlohmann::json to_json(const VerificationReport& report);
nlohmann::json to_json(const Case2Trace& trace);

}  // namespace octo
