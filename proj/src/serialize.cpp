#include "octo/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "octo/error.hpp"
#include "octo/norm.hpp"

namespace octo {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::parse_error, what); }

const json& require(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) fail(where + ": missing field '" + key + "'");
  return *it;
}

Real as_real(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where + ": expected a number");
  return j.get<double>();
}

std::uint64_t as_count(const json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    fail(where + ": expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

std::vector<Real> as_reals(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where + ": expected an array of numbers");
  std::vector<Real> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(as_real(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

json reals(const std::vector<Real>& values) {
  json out = json::array();
  for (Real v : values) out.push_back(static_cast<double>(v));
  return out;
}

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known) fail(where + ": unknown field '" + it.key() + "'");
  }
}

std::string format_real(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.21Lg", v);
  return buf;
}

}  // namespace

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // Drop the library's "[json.exception.parse_error.N] " prefix; the rest
    // already reads "parse error at line L, column C: ...".
    std::string what = e.what();
    if (auto pos = what.find("] "); pos != std::string::npos) what = what.substr(pos + 2);
    fail(what);
  }
}

json vector_to_json(const TowerVector& x) { return {{"base", reals(x.base)}, {"coords", reals(x.coords)}}; }

TowerVector vector_from_json(const json& j) {
  if (!j.is_object()) fail("vector: expected an object with 'base' and 'coords'");
  only_keys(j, {"base", "coords"}, "vector");
  TowerVector x;
  x.base = as_reals(require(j, "base", "vector"), "vector.base");
  if (auto it = j.find("coords"); it != j.end()) x.coords = as_reals(*it, "vector.coords");
  if (x.base.empty()) fail("vector.base: must not be empty");
  for (Real v : x.base) {
    if (!std::isfinite(v)) fail("vector.base: entries must be finite");
  }
  return x;
}

std::string vector_to_csv_row(const TowerVector& x) {
  std::string row;
  auto add = [&](Real v) {
    if (!row.empty()) row += ',';
    row += format_real(v);
  };
  for (Real v : x.base) add(v);
  for (Real v : x.coords) add(v);
  return row;
}

TowerVector vector_from_csv_row(std::string_view row, std::size_t base_dim) {
  std::vector<Real> values;
  std::size_t column = 1;
  std::size_t start = 0;
  while (start <= row.size()) {
    std::size_t end = row.find(',', start);
    if (end == std::string_view::npos) end = row.size();
    std::string cell(row.substr(start, end - start));
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t lead = cell.find_first_not_of(' ');
    cell = lead == std::string::npos ? "" : cell.substr(lead);
    char* stop = nullptr;
    const Real v = std::strtold(cell.c_str(), &stop);
    if (cell.empty() || *stop != '\0') {
      fail("csv: column " + std::to_string(column) + ": '" + cell + "' is not a number");
    }
    values.push_back(v);
    ++column;
    start = end + 1;
  }
  if (values.size() < base_dim) {
    fail("csv: row has " + std::to_string(values.size()) + " values, base dimension is " +
         std::to_string(base_dim));
  }
  TowerVector x;
  x.base.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(base_dim));
  x.coords.assign(values.begin() + static_cast<std::ptrdiff_t>(base_dim), values.end());
  return x;
}

TowerVector vector_from_text(std::string_view text, std::size_t base_dim) {
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) fail("vector input is empty");
  if (text[first] == '{') {
    TowerVector x = vector_from_json(parse_json(text));
    if (x.base.size() != base_dim) {
      throw Error(ErrorCode::dimension_mismatch,
                  "vector base has " + std::to_string(x.base.size()) + " entries, space has dimension " +
                      std::to_string(base_dim));
    }
    return x;
  }
  std::optional<TowerVector> row;
  std::size_t line_no = 0, start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    const std::size_t lead = line.find_first_not_of(" \t\r");
    if (lead == std::string_view::npos || line[lead] == '#') continue;
    if (row) fail("csv: line " + std::to_string(line_no) + ": expected a single vector row");
    try {
      row = vector_from_csv_row(line, base_dim);
    } catch (const Error& e) {
      fail("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!row) fail("vector input has no data row");
  return *row;
}

json eval_result_json(const TowerSpace& space, const TowerVector& x, std::size_t level) {
  const std::size_t n = level == 0 ? x.support() : level;
  const LevelNormResult r = level_norm(space, x, n);
  const Real oracle = minkowski_oracle(space, x, n, Tolerances{1e-13L, space.tol().max_iterations});
  return {{"value", static_cast<double>(r.value)},
          {"per_level", reals(r.per_level)},
          {"oracle", static_cast<double>(oracle)},
          {"tail_bound", static_cast<double>(ell1_tail(x, n))},
          {"level", n}};
}

json derivative_to_json(const DerivativeEstimate& estimate) {
  json steps = json::array();
  for (const DerivativeStep& s : estimate.steps) {
    steps.push_back({{"t", static_cast<double>(s.t)}, {"quotient", static_cast<double>(s.quotient)}});
  }
  return {{"right", static_cast<double>(estimate.right)},
          {"left", static_cast<double>(estimate.left)},
          {"gateaux", estimate.gateaux},
          {"tol_used", static_cast<double>(estimate.tol_used)},
          {"steps", steps}};
}

namespace {

struct TableRow {
  std::size_t level;
  Real z, l, s, m, v, alpha, c, product, octahedrality;
};

std::vector<TableRow> table_rows(const TowerSpace& space) {
  std::vector<TableRow> rows;
  Real product = 1;
  for (std::size_t n = 1; n <= space.max_level(); ++n) {
    const ShapeFn& f = space.schedule().shape(n);
    product *= 1 + f.m;
    const Real a = f.z + f.l;
    rows.push_back({n, f.z, f.l, f.s, f.m, f.v, f.alpha, f.c, product, a / (a + 2)});
  }
  return rows;
}

}  // namespace

json schedule_table_json(const TowerSpace& space) {
  json out = json::array();
  for (const TableRow& r : table_rows(space)) {
    out.push_back({{"level", r.level},
                   {"z", static_cast<double>(r.z)},
                   {"l", static_cast<double>(r.l)},
                   {"s", static_cast<double>(r.s)},
                   {"m", static_cast<double>(r.m)},
                   {"v", static_cast<double>(r.v)},
                   {"alpha", static_cast<double>(r.alpha)},
                   {"c", static_cast<double>(r.c)},
                   {"product_prefix", static_cast<double>(r.product)},
                   {"octahedrality", static_cast<double>(r.octahedrality)}});
  }
  return out;
}

std::string schedule_table_csv(const TowerSpace& space) {
  std::string out = "level,z,l,s,m,v,alpha,c,product_prefix,octahedrality\n";
  char buf[512];
  for (const TableRow& r : table_rows(space)) {
    std::snprintf(buf, sizeof buf, "%zu,%.17Lg,%.17Lg,%.17Lg,%.17Lg,%.17Lg,%.17Lg,%.17Lg,%.17Lg,%.17Lg\n",
                  r.level, r.z, r.l, r.s, r.m, r.v, r.alpha, r.c, r.product, r.octahedrality);
    out += buf;
  }
  return out;
}

json schedule_to_json(const ShapeSchedule& schedule) {
  json j = {{"kind", schedule.kind() == ScheduleKind::default_geometric ? "default_geometric" : "explicit"},
            {"levels", schedule.levels()},
            {"z", reals(schedule.z_values())},
            {"l", reals(schedule.l_values())},
            {"s", reals(schedule.s_values())}};
  if (schedule.kind() == ScheduleKind::default_geometric) {
    const GeometricParams& p = schedule.params();
    j["params"] = {{"z_ratio", static_cast<double>(p.z_ratio)},
                   {"l_ratio", static_cast<double>(p.l_ratio)},
                   {"s_scale", static_cast<double>(p.s_scale)},
                   {"s_ratio", static_cast<double>(p.s_ratio)}};
  }
  return j;
}

ShapeSchedule schedule_from_json(const json& j) {
  if (!j.is_object()) fail("schedule: expected an object");
  only_keys(j, {"kind", "levels", "z", "l", "s", "params"}, "schedule");
  std::string kind = "default_geometric";
  if (auto it = j.find("kind"); it != j.end()) {
    if (!it->is_string()) fail("schedule.kind: expected a string");
    kind = it->get<std::string>();
  }

  if (kind == "explicit") {
    std::vector<Real> z = as_reals(require(j, "z", "schedule"), "schedule.z");
    std::vector<Real> l = as_reals(require(j, "l", "schedule"), "schedule.l");
    std::vector<Real> s = as_reals(require(j, "s", "schedule"), "schedule.s");
    if (auto it = j.find("levels"); it != j.end() && as_count(*it, "schedule.levels") != z.size()) {
      fail("schedule.levels: does not match the length of the z list");
    }
    return ShapeSchedule::explicit_list(std::move(z), std::move(l), std::move(s));
  }
  if (kind != "default_geometric") {
    fail("schedule.kind: expected 'default_geometric' or 'explicit', got '" + kind + "'");
  }
  const std::size_t levels = j.contains("levels") ? as_count(j["levels"], "schedule.levels") : 40;
  GeometricParams params;
  if (auto it = j.find("params"); it != j.end()) {
    if (!it->is_object()) fail("schedule.params: expected an object");
    only_keys(*it, {"z_ratio", "l_ratio", "s_scale", "s_ratio"}, "schedule.params");
    if (it->contains("z_ratio")) params.z_ratio = as_real((*it)["z_ratio"], "schedule.params.z_ratio");
    if (it->contains("l_ratio")) params.l_ratio = as_real((*it)["l_ratio"], "schedule.params.l_ratio");
    if (it->contains("s_scale")) params.s_scale = as_real((*it)["s_scale"], "schedule.params.s_scale");
    if (it->contains("s_ratio")) params.s_ratio = as_real((*it)["s_ratio"], "schedule.params.s_ratio");
  }
  ShapeSchedule schedule = ShapeSchedule::geometric(levels, params);

  // Materialized arrays are optional for generators; when given they must agree.
  const std::pair<const char*, const std::vector<Real>*> lists[] = {
      {"z", &schedule.z_values()}, {"l", &schedule.l_values()}, {"s", &schedule.s_values()}};
  for (const auto& [key, expected] : lists) {
    if (!j.contains(key)) continue;
    const std::vector<Real> given = as_reals(j[key], std::string("schedule.") + key);
    bool same = given.size() == expected->size();
    for (std::size_t i = 0; same && i < given.size(); ++i) {
      same = std::fabs(given[i] - (*expected)[i]) <= 1e-15L * std::max<Real>(1, std::fabs(given[i]));
    }
    if (!same) fail(std::string("schedule.") + key + ": does not match the generator");
  }
  return schedule;
}

OutputFormat parse_format(std::string_view name) {
  if (name == "json") return OutputFormat::json;
  if (name == "csv") return OutputFormat::csv;
  fail("output format must be 'json' or 'csv', got '" + std::string(name) + "'");
}

Config config_from_json(const json& j) {
  if (!j.is_object()) fail("config: expected an object");
  only_keys(j, {"schedule", "base_dim", "tolerances", "seed", "output"}, "config");

  Config config;
  ShapeSchedule schedule = j.contains("schedule") ? schedule_from_json(j["schedule"])
                                                  : ShapeSchedule::geometric(40);
  BaseSpace base;
  base.dim = j.contains("base_dim") ? as_count(j["base_dim"], "config.base_dim") : 3;
  Tolerances tol;
  if (auto it = j.find("tolerances"); it != j.end()) {
    if (!it->is_object()) fail("config.tolerances: expected an object");
    only_keys(*it, {"solver_rel", "max_iterations", "verify"}, "config.tolerances");
    if (it->contains("solver_rel")) tol.rel = as_real((*it)["solver_rel"], "config.tolerances.solver_rel");
    if (it->contains("max_iterations")) {
      tol.max_iterations =
          static_cast<int>(as_count((*it)["max_iterations"], "config.tolerances.max_iterations"));
    }
    if (it->contains("verify")) config.verify_tol = as_real((*it)["verify"], "config.tolerances.verify");
  }
  if (j.contains("seed")) config.seed = as_count(j["seed"], "config.seed");
  if (auto it = j.find("output"); it != j.end()) {
    if (!it->is_object()) fail("config.output: expected an object");
    only_keys(*it, {"path", "format"}, "config.output");
    if (it->contains("path")) {
      if (!(*it)["path"].is_string()) fail("config.output.path: expected a string");
      config.output_path = (*it)["path"].get<std::string>();
    }
    if (it->contains("format")) {
      if (!(*it)["format"].is_string()) fail("config.output.format: expected a string");
      config.format = parse_format((*it)["format"].get<std::string>());
    }
  }
  // Module validators run here, before any command sees the configuration.
  config.space = TowerSpace(base, std::move(schedule), tol, config.seed);
  return config;
}

json config_to_json(const Config& config) {
  json tolerances = {{"solver_rel", static_cast<double>(config.space.tol().rel)},
                     {"max_iterations", config.space.tol().max_iterations}};
  if (config.verify_tol) tolerances["verify"] = static_cast<double>(*config.verify_tol);
  json output = {{"format", config.format == OutputFormat::json ? "json" : "csv"}};
  if (!config.output_path.empty()) output["path"] = config.output_path;
  return {{"schedule", schedule_to_json(config.space.schedule())},
          {"base_dim", config.space.base().dim},
          {"tolerances", tolerances},
          {"seed", config.seed},
          {"output", output}};
}

}  // namespace octo
