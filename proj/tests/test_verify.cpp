#include <cmath>
#include <set>

#include "doctest.h"
#include "octo/error.hpp"
#include "octo/verify.hpp"

using namespace octo;

namespace {

const TowerSpace& space3() {
  static const TowerSpace s = TowerSpace::standard(3, 40);
  return s;
}

VerifyOptions few(std::size_t samples, std::uint64_t seed = 0) {
  VerifyOptions o;
  o.samples = samples;
  o.seed = seed;
  return o;
}

void check_consistent(const VerificationReport& r) {
  CHECK(r.passed == (r.violations == 0));
  std::size_t total = 0;
  for (const SubCheck& s : r.sub_checks) {
    total += s.violations;
    CHECK(s.evaluations > 0);
  }
  CHECK(total == r.violations);
  if (r.violations > 0) {
    CHECK(r.worst_witness.is_object());
    CHECK(r.worst_witness.contains("sub_check"));
  }
}

}  // namespace

TEST_CASE("check catalogue") {
  const auto& names = check_names();
  CHECK(names.size() == 7);
  CHECK(std::set<std::string>(names.begin(), names.end()).size() == 7);
  CHECK_THROWS_AS(run_check("nonsense", space3()), Error);
  try {
    run_check("nonsense", space3());
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_argument);
  }
}

TEST_CASE("octahedral start level") {
  const TowerSpace& s = space3();
  CHECK(octahedral_start_level(s, 0.1L) == 3);
  CHECK(octahedral_start_level(s, 0.5L) == 1);
  CHECK(octahedral_start_level(s, 0.13L) == 3);
  CHECK(octahedral_start_level(s, 0.136L) == 2);
  try {
    octahedral_start_level(s, 1e-30L);
    FAIL("expected a failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::hypothesis_failure);
  }
  CHECK_THROWS_AS(octahedral_start_level(s, 0), Error);
  CHECK_THROWS_AS(octahedral_start_level(s, 1), Error);

  const VerificationReport r = verify_octahedral(s, few(60));
  CHECK(r.details["n0"] == 3);
  CHECK(r.passed);
  check_consistent(r);
}

TEST_CASE("every check passes on small runs") {
  for (std::size_t dim : {1u, 2u, 3u}) {
    const TowerSpace s = TowerSpace::standard(dim, 40);
    for (const std::string& name : check_names()) {
      CAPTURE(name);
      CAPTURE(dim);
      const VerificationReport r = run_check(name, s, few(name == "case2" ? 4 : 25, 11));
      CHECK(r.check_name == name);
      CHECK(r.passed);
      check_consistent(r);
    }
  }
}

TEST_CASE("reports are deterministic in the seed") {
  auto strip = [](nlohmann::json j) {
    j.erase("runtime_ms");
    return j;
  };
  const auto a = to_json(verify_structure(space3(), few(40, 5)));
  const auto b = to_json(verify_structure(space3(), few(40, 5)));
  const auto c = to_json(verify_structure(space3(), few(40, 6)));
  CHECK(strip(a) == strip(b));
  CHECK(strip(a) != strip(c));
}

TEST_CASE("failing reports carry a witness") {
  VerifyOptions o = few(3);
  o.tol = 1e-40L;
  const VerificationReport shape = verify_shape(space3(), o);
  check_consistent(shape);
  CHECK_FALSE(shape.passed);
  CHECK(shape.worst_witness.contains("level"));
  CHECK(shape.worst_violation > 1e-40L);
}

TEST_CASE("option validation") {
  VerifyOptions o;
  o.tol = -1;
  CHECK_THROWS_AS(verify_shape(space3(), o), Error);
  o = VerifyOptions{};
  o.max_degree = 1;
  CHECK_THROWS_AS(verify_structure(space3(), o), Error);
  o = VerifyOptions{};
  o.epsilon = 1.5L;
  CHECK_THROWS_AS(verify_octahedral(space3(), o), Error);

  const TowerSpace one_level(BaseSpace{1}, ShapeSchedule::geometric(1));
  CHECK_THROWS_AS(verify_shape(one_level, {}), Error);
}

TEST_CASE("case 1 certifies its hypotheses") {
  const VerificationReport r = verify_case1(space3(), few(30, 3));
  CHECK(r.passed);
  const auto& h = r.details["hypotheses"];
  CHECK(h["accepted"] == 30);
  CHECK(h["attempts"].get<std::size_t>() >= 30);
  std::set<std::string> subs;
  for (const SubCheck& s : r.sub_checks) subs.insert(s.name);
  CHECK(subs.count("ratio_inequality") == 1);
  CHECK(subs.count("telescoped_bound") == 1);
  CHECK(subs.count("inherited_orthogonality") == 1);
}

TEST_CASE("case 2 trace is aligned") {
  const VerificationReport r = verify_case2(space3(), few(3, 2));
  CHECK(r.passed);
  const auto& t = r.details["trace"];
  const std::size_t k = t["k"];
  CHECK(t["C_sequence"].size() == k + 1);
  CHECK(t["h_gaps"].size() == k);
  CHECK(t["E_values"].size() == k);
  CHECK(t["lhs"].get<double>() <= t["rhs"].get<double>());
  for (const auto& c : t["C_sequence"]) CHECK(std::fabs(c.get<double>()) <= 16.0 / 15 + 1e-6);
  CHECK(r.details["hypotheses"]["accepted"] == 3);
}

TEST_CASE("smoothness reports its slowest trail") {
  const VerificationReport r = verify_smoothness(space3(), few(10, 4));
  CHECK(r.passed);
  CHECK(r.samples == 12);
  CHECK(r.details["slowest_trail"]["quotients"].size() == 21);
  CHECK(r.details["tail_points"] == 2);
}

TEST_CASE("report serialization uses the documented field names") {
  const auto j = to_json(verify_equivalence(space3(), few(10)));
  for (const char* key : {"check_name", "samples", "violations", "worst_violation", "worst_witness",
                          "tolerance", "passed", "runtime_ms"}) {
    CAPTURE(key);
    CHECK(j.contains(key));
  }
  CHECK(j["check_name"] == "equivalence");
  CHECK(j["details"]["product_prefix_2"].get<double>() == 1.58984375);
}
