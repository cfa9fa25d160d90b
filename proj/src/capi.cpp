#include "octo/octo.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "octo/calculus.hpp"
#include "octo/error.hpp"
#include "octo/norm.hpp"
#include "octo/serialize.hpp"
#include "octo/slice.hpp"
#include "octo/verify.hpp"

struct octo_space {
  octo::TowerSpace space;
};

namespace {

thread_local std::string last_error;

octo_status to_status(octo::ErrorCode code) {
  switch (code) {
    case octo::ErrorCode::invalid_argument: return OCTO_ERR_INVALID_ARGUMENT;
    case octo::ErrorCode::schedule_invalid: return OCTO_ERR_SCHEDULE_INVALID;
    case octo::ErrorCode::not_converged: return OCTO_ERR_NOT_CONVERGED;
    case octo::ErrorCode::not_differentiable: return OCTO_ERR_NOT_DIFFERENTIABLE;
    case octo::ErrorCode::parse_error: return OCTO_ERR_PARSE;
    case octo::ErrorCode::degenerate_plane: return OCTO_ERR_DEGENERATE_PLANE;
    case octo::ErrorCode::dimension_mismatch: return OCTO_ERR_DIMENSION_MISMATCH;
    case octo::ErrorCode::out_of_range: return OCTO_ERR_OUT_OF_RANGE;
    case octo::ErrorCode::hypothesis_failure: return OCTO_ERR_HYPOTHESIS;
  }
  return OCTO_ERR_INTERNAL;
}

template <class F>
octo_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return OCTO_OK;
  } catch (const octo::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return OCTO_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  if (p == nullptr) throw octo::Error(octo::ErrorCode::invalid_argument, std::string(what) + " is null");
}

char* copy_out(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

octo::TowerVector from_arrays(const octo_space* space, const double* base, const double* coords,
                              std::size_t degree) {
  need(space, "space");
  need(base, "base");
  if (degree > 0) need(coords, "coords");
  octo::TowerVector x;
  x.base.assign(base, base + space->space.base().dim);
  if (degree > 0) x.coords.assign(coords, coords + degree);
  return x;
}

octo::TowerVector from_text(const octo_space* space, const char* text, const char* what) {
  need(text, what);
  return octo::vector_from_text(text, space->space.base().dim);
}

}  // namespace

extern "C" {

const char* octo_version(void) { return "1.0.0"; }

const char* octo_status_name(octo_status status) {
  switch (status) {
    case OCTO_OK: return "ok";
    case OCTO_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case OCTO_ERR_SCHEDULE_INVALID: return "schedule_invalid";
    case OCTO_ERR_NOT_CONVERGED: return "not_converged";
    case OCTO_ERR_NOT_DIFFERENTIABLE: return "not_differentiable";
    case OCTO_ERR_PARSE: return "parse_error";
    case OCTO_ERR_DEGENERATE_PLANE: return "degenerate_plane";
    case OCTO_ERR_DIMENSION_MISMATCH: return "dimension_mismatch";
    case OCTO_ERR_OUT_OF_RANGE: return "out_of_range";
    case OCTO_ERR_HYPOTHESIS: return "hypothesis_failure";
    case OCTO_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* octo_last_error(void) { return last_error.c_str(); }

void octo_string_free(char* s) { std::free(s); }

octo_status octo_space_create_default(size_t base_dim, size_t levels, octo_space** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    *out = new octo_space{octo::TowerSpace::standard(base_dim, levels)};
  });
}

octo_status octo_space_create_from_json(const char* config_json, octo_space** out) {
  return guarded([&] {
    need(out, "out");
    need(config_json, "config_json");
    *out = nullptr;
    octo::Config config = octo::config_from_json(octo::parse_json(config_json));
    *out = new octo_space{std::move(config.space)};
  });
}

void octo_space_destroy(octo_space* space) { delete space; }

size_t octo_space_base_dim(const octo_space* space) { return space ? space->space.base().dim : 0; }

size_t octo_space_levels(const octo_space* space) { return space ? space->space.max_level() : 0; }

octo_status octo_space_config_json(const octo_space* space, char** out_json) {
  return guarded([&] {
    need(space, "space");
    need(out_json, "out_json");
    octo::Config config;
    config.space = space->space;
    config.seed = space->space.seed();
    *out_json = copy_out(octo::config_to_json(config).dump(2));
  });
}

octo_status octo_level_norm(const octo_space* space, const double* base, const double* coords,
                            size_t degree, size_t level, double* out_value) {
  return guarded([&] {
    need(out_value, "out_value");
    const octo::TowerVector x = from_arrays(space, base, coords, degree);
    *out_value = static_cast<double>(octo::level_norm(space->space, x, level).value);
  });
}

octo_status octo_tower_norm(const octo_space* space, const double* base, const double* coords,
                            size_t degree, double* out_value) {
  return guarded([&] {
    need(out_value, "out_value");
    const octo::TowerVector x = from_arrays(space, base, coords, degree);
    *out_value = static_cast<double>(octo::tower_norm(space->space, x));
  });
}

octo_status octo_oracle(const octo_space* space, const double* base, const double* coords, size_t degree,
                        size_t level, double* out_value) {
  return guarded([&] {
    need(out_value, "out_value");
    const octo::TowerVector x = from_arrays(space, base, coords, degree);
    const octo::Tolerances tol{1e-13L, space->space.tol().max_iterations};
    *out_value = static_cast<double>(octo::minkowski_oracle(space->space, x, level, tol));
  });
}

octo_status octo_shape_value(const octo_space* space, size_t level, double t, double* out_value) {
  return guarded([&] {
    need(space, "space");
    need(out_value, "out_value");
    *out_value = static_cast<double>(space->space.schedule().shape(level).value(t));
  });
}

octo_status octo_shape_derivative(const octo_space* space, size_t level, double t, double* out_value) {
  return guarded([&] {
    need(space, "space");
    need(out_value, "out_value");
    *out_value = static_cast<double>(space->space.schedule().shape(level).derivative(t));
  });
}

octo_status octo_eval_json(const octo_space* space, const char* vector, size_t level, char** out_json) {
  return guarded([&] {
    need(space, "space");
    need(out_json, "out_json");
    const octo::TowerVector x = from_text(space, vector, "vector");
    *out_json = copy_out(octo::eval_result_json(space->space, x, level).dump(2));
  });
}

octo_status octo_derivative_json(const octo_space* space, const char* x, const char* h, char** out_json) {
  return guarded([&] {
    need(space, "space");
    need(out_json, "out_json");
    const octo::TowerVector xv = from_text(space, x, "x");
    const octo::TowerVector hv = from_text(space, h, "h");
    *out_json = copy_out(octo::derivative_to_json(octo::directional_derivative(space->space, xv, hv)).dump(2));
  });
}

octo_status octo_slice_csv(const octo_space* space, const char* u, const char* v, size_t level,
                           size_t resolution, char** out_csv) {
  return guarded([&] {
    need(space, "space");
    need(out_csv, "out_csv");
    const octo::TowerVector uv = from_text(space, u, "u");
    const octo::TowerVector vv = from_text(space, v, "v");
    *out_csv = copy_out(octo::slice_to_csv(octo::slice(space->space, uv, vv, level, resolution)));
  });
}

void octo_verify_options_init(octo_verify_options* options) {
  if (options == nullptr) return;
  const octo::VerifyOptions defaults;
  options->samples = defaults.samples;
  options->seed = defaults.seed;
  options->has_tol = 0;
  options->tol = 0;
  options->epsilon = static_cast<double>(defaults.epsilon);
  options->max_degree = defaults.max_degree;
}

octo_status octo_verify_json(const octo_space* space, const char* check, const octo_verify_options* options,
                             char** out_json, int* all_passed) {
  return guarded([&] {
    need(space, "space");
    need(check, "check");
    need(out_json, "out_json");
    octo::VerifyOptions opts;
    if (options != nullptr) {
      opts.samples = options->samples;
      opts.seed = options->seed;
      if (options->has_tol) opts.tol = options->tol;
      opts.epsilon = options->epsilon;
      opts.max_degree = options->max_degree;
    }
    std::vector<octo::VerificationReport> reports;
    if (std::string(check) == "all") {
      reports = octo::run_all(space->space, opts);
    } else {
      reports.push_back(octo::run_check(check, space->space, opts));
    }
    nlohmann::json out = nlohmann::json::array();
    bool passed = true;
    for (const auto& r : reports) {
      out.push_back(octo::to_json(r));
      passed = passed && r.passed;
    }
    *out_json = copy_out(out.dump(2));
    if (all_passed != nullptr) *all_passed = passed ? 1 : 0;
  });
}

octo_status octo_schedule_table(const octo_space* space, const char* format, char** out) {
  return guarded([&] {
    need(space, "space");
    need(format, "format");
    need(out, "out");
    const std::string f = format;
    if (f == "json") {
      *out = copy_out(octo::schedule_table_json(space->space).dump(2));
    } else if (f == "csv") {
      *out = copy_out(octo::schedule_table_csv(space->space));
    } else {
      throw octo::Error(octo::ErrorCode::invalid_argument, "table format must be 'json' or 'csv'");
    }
  });
}

}  // extern "C"
