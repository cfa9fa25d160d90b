// Command-line front end over the shared library.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "octo/octo.h"

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitChecksFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

/// Carries an exit code out of a command.
struct Exit {
  int code;
  std::string message;
};

int exit_code(octo_status status) {
  switch (status) {
    case OCTO_OK: return kExitOk;
    case OCTO_ERR_NOT_CONVERGED:
    case OCTO_ERR_NOT_DIFFERENTIABLE:
    case OCTO_ERR_HYPOTHESIS:
    case OCTO_ERR_INTERNAL: return kExitNumerical;
    default: return kExitUsage;
  }
}

void check(octo_status status) {
  if (status != OCTO_OK) {
    throw Exit{exit_code(status), std::string(octo_status_name(status)) + ": " + octo_last_error()};
  }
}

/// Owns a string allocated by the library.
struct LibString {
  char* p = nullptr;
  ~LibString() { octo_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct SpaceHandle {
  octo_space* p = nullptr;
  ~SpaceHandle() { octo_space_destroy(p); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Exit{kExitUsage, "cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Inline JSON objects and numeric CSV rows are used as given; anything else is a path.
std::string file_or_inline(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) return read_file(arg);
  const std::size_t first = arg.find_first_not_of(" \t");
  if (first != std::string::npos && std::string_view("{+-.0123456789").find(arg[first]) != std::string_view::npos) {
    return arg;
  }
  return read_file(arg);
}

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string format;  // empty: command default
};

struct Session {
  SpaceHandle space;
  std::uint64_t seed = 0;
  std::optional<double> verify_tol;
  std::string out_path;
  std::string format;
};

void open_session(const Globals& g, Session& s) {
  std::string config_text = "{}";
  if (!g.config_path.empty()) config_text = read_file(g.config_path);
  check(octo_space_create_from_json(config_text.c_str(), &s.space.p));
  // The library has validated the document; only the run-level fields are read here.
  const json config = json::parse(config_text);
  s.seed = config.value("seed", std::uint64_t{0});
  if (auto t = config.find("tolerances"); t != config.end() && t->contains("verify")) {
    s.verify_tol = (*t)["verify"].get<double>();
  }
  if (auto o = config.find("output"); o != config.end()) {
    s.out_path = o->value("path", "");
    s.format = o->value("format", "");
  }
  if (g.seed) s.seed = *g.seed;
  if (!g.out_path.empty()) s.out_path = g.out_path;
  if (!g.format.empty()) s.format = g.format;
}

void emit(const Session& s, const std::string& text) {
  const std::string body = (!text.empty() && text.back() == '\n') ? text : text + "\n";
  if (s.out_path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(s.out_path, std::ios::binary);
  if (!out) throw Exit{kExitUsage, "cannot write '" + s.out_path + "'"};
  out << body;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_json_number(const json& v) { return v.is_number() ? fmt(v.get<double>()) : ""; }

bool wants_csv(const Session& s, bool csv_by_default) {
  return s.format.empty() ? csv_by_default : s.format == "csv";
}

// ---------------------------------------------------------------------------

int cmd_eval(const Session& s, const std::string& vector_arg, std::size_t level) {
  const std::string text = file_or_inline(vector_arg);
  LibString out;
  check(octo_eval_json(s.space.p, text.c_str(), level, &out.p));
  if (!wants_csv(s, false)) {
    emit(s, out.str());
    return kExitOk;
  }
  const json r = json::parse(out.str());
  std::string csv = "level,norm\n";
  for (std::size_t k = 0; k < r["per_level"].size(); ++k) {
    csv += std::to_string(k) + "," + fmt_json_number(r["per_level"][k]) + "\n";
  }
  emit(s, csv);
  return kExitOk;
}

int cmd_derivative(const Session& s, const std::string& x_arg, const std::string& h_arg) {
  const std::string x = file_or_inline(x_arg), h = file_or_inline(h_arg);
  LibString out;
  check(octo_derivative_json(s.space.p, x.c_str(), h.c_str(), &out.p));
  if (!wants_csv(s, false)) {
    emit(s, out.str());
    return kExitOk;
  }
  const json r = json::parse(out.str());
  std::string csv = "t,quotient\n";
  for (const json& step : r["steps"]) {
    csv += fmt_json_number(step["t"]) + "," + fmt_json_number(step["quotient"]) + "\n";
  }
  emit(s, csv);
  return kExitOk;
}

int cmd_slice(const Session& s, const std::string& u_arg, const std::string& v_arg, std::size_t level,
              std::size_t resolution) {
  const std::size_t dim = octo_space_base_dim(s.space.p);
  auto basis = [&](bool base_unit) {
    json b = json::array();
    for (std::size_t i = 0; i < dim; ++i) b.push_back(base_unit && i == 0 ? 1.0 : 0.0);
    json c = json::array();
    if (!base_unit) c.push_back(1.0);
    return json{{"base", b}, {"coords", c}}.dump();
  };
  const std::string u = u_arg.empty() ? basis(true) : file_or_inline(u_arg);
  const std::string v = v_arg.empty() ? basis(false) : file_or_inline(v_arg);
  LibString out;
  check(octo_slice_csv(s.space.p, u.c_str(), v.c_str(), level, resolution, &out.p));
  if (wants_csv(s, true)) {
    emit(s, out.str());
    return kExitOk;
  }
  std::istringstream rows(out.str());
  std::string line;
  std::getline(rows, line);  // header
  json points = json::array();
  while (std::getline(rows, line)) {
    double theta, radius, px, py;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &theta, &radius, &px, &py) == 4) {
      points.push_back({{"theta", theta}, {"radius", radius}, {"px", px}, {"py", py}});
    }
  }
  emit(s, json{{"level", level}, {"resolution", resolution}, {"points", points}}.dump(2));
  return kExitOk;
}

int cmd_verify(const Session& s, const std::string& name, std::size_t samples, std::optional<double> tol,
               double epsilon, std::size_t max_degree) {
  octo_verify_options opts;
  octo_verify_options_init(&opts);
  opts.samples = samples;
  opts.seed = s.seed;
  opts.epsilon = epsilon;
  opts.max_degree = max_degree;
  if (!tol) tol = s.verify_tol;
  if (tol) {
    opts.has_tol = 1;
    opts.tol = *tol;
  }
  LibString out;
  int passed = 0;
  check(octo_verify_json(s.space.p, name.c_str(), &opts, &out.p, &passed));
  if (wants_csv(s, false)) {
    const json reports = json::parse(out.str());
    std::string csv = "check_name,samples,violations,worst_violation,tolerance,passed,runtime_ms\n";
    for (const json& r : reports) {
      csv += r["check_name"].get<std::string>() + "," + std::to_string(r["samples"].get<long long>()) + "," +
             std::to_string(r["violations"].get<long long>()) + "," + fmt_json_number(r["worst_violation"]) +
             "," + fmt_json_number(r["tolerance"]) + "," + (r["passed"].get<bool>() ? "true" : "false") + "," +
             std::to_string(r["runtime_ms"].get<long long>()) + "\n";
    }
    emit(s, csv);
  } else {
    emit(s, out.str());
  }
  return passed ? kExitOk : kExitChecksFailed;
}

int cmd_schedule(const Session& s) {
  LibString out;
  check(octo_schedule_table(s.space.p, wants_csv(s, false) ? "csv" : "json", &out.p));
  emit(s, out.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluate and verify the octahedral, Gateaux-smooth tower norm"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "Configuration JSON file");
  app.add_option("--seed", g.seed, "Seed for sampled checks (overrides the config)");
  app.add_option("--out", g.out_path, "Write output to this file instead of stdout");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  std::string vector_arg;
  std::size_t eval_level = 0;
  auto* eval = app.add_subcommand("eval", "Norm of a vector with its level trail and oracle cross-check");
  eval->add_option("vector", vector_arg, "Vector file (JSON or CSV row) or inline JSON")->required();
  eval->add_option("--level", eval_level, "Truncation level (default: support of the vector)");

  std::string u_arg, v_arg;
  std::size_t slice_level = 1, resolution = 720;
  auto* sl = app.add_subcommand("slice", "Unit-sphere cross-section in span{u, v}");
  sl->add_option("--u", u_arg, "First plane vector (default: first base direction)");
  sl->add_option("--v", v_arg, "Second plane vector (default: e_1)");
  sl->add_option("--level", slice_level, "Level of the norm")->check(CLI::NonNegativeNumber);
  sl->add_option("--resolution", resolution, "Number of angular steps")->check(CLI::Range(3, 10000000));

  std::string check_name;
  std::size_t samples = 0, max_degree = 8;
  std::optional<double> tol;
  double epsilon = 0.1;
  auto* ver = app.add_subcommand("verify", "Run sampled certificates; exits 0 only when all pass");
  ver->add_option("check", check_name, "Check name or 'all'")->required();
  ver->add_option("--samples", samples, "Samples per check (default: per-check)");
  ver->add_option("--tol", tol, "Override additive tolerances")->check(CLI::PositiveNumber);
  ver->add_option("--epsilon", epsilon, "Octahedrality target")->check(CLI::Range(0.0, 1.0));
  ver->add_option("--max-degree", max_degree, "Largest sample degree")->check(CLI::Range(2, 64));

  app.add_subcommand("schedule", "Per-level schedule table");

  std::string x_arg, h_arg;
  auto* der = app.add_subcommand("derivative", "One-sided directional derivatives with the step trail");
  der->add_option("point", x_arg, "Base point x")->required();
  der->add_option("direction", h_arg, "Direction h")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    Session s;
    open_session(g, s);
    if (*eval) return cmd_eval(s, vector_arg, eval_level);
    if (*sl) return cmd_slice(s, u_arg, v_arg, slice_level, resolution);
    if (*ver) return cmd_verify(s, check_name, samples, tol, epsilon, max_degree);
    if (*der) return cmd_derivative(s, x_arg, h_arg);
    return cmd_schedule(s);
  } catch (const Exit& e) {
    std::cerr << "octo: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "octo: " << e.what() << "\n";
    return kExitNumerical;
  }
}
