#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "doctest.h"
#include "octo/error.hpp"
#include "octo/norm.hpp"
#include "octo/serialize.hpp"
#include "test_support.hpp"

using namespace octo;
using octo::test::vec;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an octo::Error");
  return ErrorCode::invalid_argument;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("json syntax errors report a position") {
  const std::string msg = message_of([] { parse_json("{\n  \"base\": [1,\n  ]\n}"); });
  CHECK(msg.find("line 3, column 3") != std::string::npos);
  CHECK(msg.find("json.exception") == std::string::npos);
  CHECK(code_of([] { parse_json(""); }) == ErrorCode::parse_error);
}

TEST_CASE("vector json") {
  const TowerVector x = vec({0.5L, -0.25L}, {1, 0, -0.125L});
  CHECK(vector_from_json(vector_to_json(x)) == x);
  CHECK(vector_from_json(parse_json(R"({"base":[1]})")) == vec({1}, {}));
  CHECK(code_of([] { vector_from_json(parse_json(R"({"coords":[1]})")); }) == ErrorCode::parse_error);
  CHECK(code_of([] { vector_from_json(parse_json(R"({"base":"x"})")); }) == ErrorCode::parse_error);
  CHECK(code_of([] { vector_from_json(parse_json(R"({"base":[1],"extra":2})")); }) ==
        ErrorCode::parse_error);
  CHECK(code_of([] { vector_from_json(parse_json(R"({"base":[]})")); }) == ErrorCode::parse_error);
  CHECK(message_of([] { vector_from_json(parse_json(R"({"base":[1, "a"]})")); }).find("vector.base[1]") !=
        std::string::npos);
}

TEST_CASE("vector csv keeps every bit") {
  const TowerVector x = vec({1.0L / 3, -2.0L / 7}, {0.1L, 1e-30L, -5.5L});
  CHECK(vector_from_csv_row(vector_to_csv_row(x), 2) == x);
  CHECK(vector_from_csv_row(" 1 , 2,3\r", 1) == vec({1}, {2, 3}));
  CHECK(code_of([] { vector_from_csv_row("1,,3", 1); }) == ErrorCode::parse_error);
  CHECK(code_of([] { vector_from_csv_row("1,abc", 1); }) == ErrorCode::parse_error);
  CHECK(code_of([] { vector_from_csv_row("1", 2); }) == ErrorCode::parse_error);
}

TEST_CASE("vector text accepts either form") {
  CHECK(vector_from_text(R"(  {"base":[1,0],"coords":[2]})", 2) == vec({1, 0}, {2}));
  CHECK(vector_from_text("# header\n\n1,0,2\n", 2) == vec({1, 0}, {2}));
  CHECK(code_of([] { vector_from_text("1,0\n2,0\n", 1); }) == ErrorCode::parse_error);
  CHECK(code_of([] { vector_from_text("   ", 1); }) == ErrorCode::parse_error);
  CHECK(code_of([] { vector_from_text(R"({"base":[1,0]})", 3); }) == ErrorCode::dimension_mismatch);
  CHECK(message_of([] { vector_from_text("# c\n1,x\n", 1); }).find("line 2") != std::string::npos);
}

TEST_CASE("schedule json round trip") {
  const ShapeSchedule g = ShapeSchedule::geometric(5);
  const nlohmann::json j = schedule_to_json(g);
  CHECK(j["kind"] == "default_geometric");
  CHECK(j["levels"] == 5);
  CHECK(j["z"].size() == 5);
  const ShapeSchedule back = schedule_from_json(j);
  CHECK(back.z_values() == g.z_values());
  CHECK(back.s_values() == g.s_values());

  const ShapeSchedule e = ShapeSchedule::explicit_list({0.3L, 0.2L}, {0.4L, 0.35L}, {0.5L, 0.6L});
  const nlohmann::json je = schedule_to_json(e);
  CHECK(je["kind"] == "explicit");
  CHECK(schedule_from_json(je).levels() == 2);
  CHECK(schedule_from_json(parse_json(R"({"levels": 3})")).levels() == 3);

  nlohmann::json tampered = j;
  tampered["z"][2] = 0.5;
  CHECK(code_of([&] { schedule_from_json(tampered); }) == ErrorCode::parse_error);
  CHECK(code_of([] { schedule_from_json(parse_json(R"({"kind":"spiral"})")); }) == ErrorCode::parse_error);
  CHECK(code_of([] { schedule_from_json(parse_json(R"({"kind":"explicit","z":[0.3]})")); }) ==
        ErrorCode::parse_error);
  const std::string bad = message_of([] {
    schedule_from_json(parse_json(R"({"kind":"explicit","z":[0.3,0.2],"l":[0.4,0.1],"s":[0.5,0.6]})"));
  });
  CHECK(bad.find("level 2") != std::string::npos);
}

TEST_CASE("config documents") {
  const Config d = config_from_json(parse_json("{}"));
  CHECK(d.space.base().dim == 3);
  CHECK(d.space.max_level() == 40);
  CHECK(d.format == OutputFormat::json);
  CHECK_FALSE(d.verify_tol.has_value());

  const Config c = config_from_json(parse_json(R"({
    "schedule": {"kind": "default_geometric", "levels": 12},
    "base_dim": 2,
    "tolerances": {"solver_rel": 1e-13, "max_iterations": 80, "verify": 1e-7},
    "seed": 42,
    "output": {"path": "out.csv", "format": "csv"}
  })"));
  CHECK(c.space.base().dim == 2);
  CHECK(c.space.max_level() == 12);
  CHECK(c.space.tol().max_iterations == 80);
  CHECK(c.seed == 42);
  CHECK(c.space.seed() == 42);
  CHECK(*c.verify_tol == doctest::Approx(1e-7));
  CHECK(c.output_path == "out.csv");
  CHECK(c.format == OutputFormat::csv);

  const Config again = config_from_json(config_to_json(c));
  CHECK(again.space.schedule().z_values() == c.space.schedule().z_values());
  CHECK(again.seed == 42);
  CHECK(again.output_path == "out.csv");

  CHECK(code_of([] { config_from_json(parse_json(R"({"colour": 1})")); }) == ErrorCode::parse_error);
  CHECK(code_of([] { config_from_json(parse_json(R"({"base_dim": 0})")); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { config_from_json(parse_json(R"({"base_dim": -2})")); }) == ErrorCode::parse_error);
  CHECK(code_of([] { config_from_json(parse_json(R"({"tolerances": {"solver_rel": 0.1}})")); }) ==
        ErrorCode::invalid_argument);
  CHECK(code_of([] { config_from_json(parse_json(R"({"output": {"format": "xml"}})")); }) ==
        ErrorCode::parse_error);
  CHECK(code_of([] { config_from_json(parse_json("[]")); }) == ErrorCode::parse_error);
}

TEST_CASE("evaluation result") {
  const TowerSpace s = TowerSpace::standard(3);
  const nlohmann::json r = eval_result_json(s, vec({1, 0, 0}, {1}));
  CHECK(r["value"].get<double>() == doctest::Approx(16.0 / 11).epsilon(1e-15));
  CHECK(std::fabs(r["oracle"].get<double>() - 16.0 / 11) <= 1e-11);
  CHECK(r["per_level"].size() == 2);
  CHECK(r["tail_bound"] == 0.0);
  CHECK(eval_result_json(s, TowerVector::unit(3, 1))["value"] == 1.0);

  const nlohmann::json truncated = eval_result_json(s, vec({0, 0, 0}, {0.5L, 0.25L, 0.125L}), 1);
  CHECK(truncated["level"] == 1);
  CHECK(truncated["tail_bound"] == 0.375);
}

TEST_CASE("derivative json keeps the step trail") {
  const TowerSpace s = TowerSpace::standard(1);
  const DerivativeEstimate d = directional_derivative(s, vec({1}, {0.5L}), vec({0}, {1}));
  const nlohmann::json j = derivative_to_json(d);
  CHECK(j["steps"].size() == d.steps.size());
  CHECK(j["gateaux"] == d.gateaux);
  CHECK(j["steps"][0]["t"] == 0.0625);
}

TEST_CASE("schedule table") {
  const TowerSpace s = TowerSpace::standard(1, 3);
  const nlohmann::json t = schedule_table_json(s);
  REQUIRE(t.size() == 3);
  CHECK(t[1]["product_prefix"] == 1.58984375);
  CHECK(t[2]["octahedrality"].get<double>() == doctest::Approx(0.140625 / 2.140625));
  CHECK(t[0]["m"] == 0.375);
  const std::string csv = schedule_table_csv(s);
  CHECK(csv.rfind("level,z,l,s,m,v,alpha,c,product_prefix,octahedrality\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  const TowerSpace one(BaseSpace{1}, ShapeSchedule::explicit_list({0.3L}, {0.4L}, {0.5L}));
  CHECK(schedule_table_json(one).size() == 1);
}
