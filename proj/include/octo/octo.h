#ifndef OCTO_OCTO_H
#define OCTO_OCTO_H

#include <stddef.h>
#include <stdint.h>

#if defined(OCTO_BUILDING_LIBRARY)
#define OCTO_API __attribute__((visibility("default")))
#else
#define OCTO_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every function below returns one; on failure the message is
 * available from octo_last_error() on the calling thread. */
typedef enum octo_status {
  OCTO_OK = 0,
  OCTO_ERR_INVALID_ARGUMENT = 1,
  OCTO_ERR_SCHEDULE_INVALID = 2,
  OCTO_ERR_NOT_CONVERGED = 3,
  OCTO_ERR_NOT_DIFFERENTIABLE = 4,
  OCTO_ERR_PARSE = 5,
  OCTO_ERR_DEGENERATE_PLANE = 6,
  OCTO_ERR_DIMENSION_MISMATCH = 7,
  OCTO_ERR_OUT_OF_RANGE = 8,
  OCTO_ERR_HYPOTHESIS = 9,
  OCTO_ERR_INTERNAL = 100
} octo_status;

typedef struct octo_space octo_space;

OCTO_API const char* octo_version(void);
OCTO_API const char* octo_status_name(octo_status status);
/* Message of the last failure on this thread; empty after a success. */
OCTO_API const char* octo_last_error(void);
/* Releases strings returned through char** out-parameters. */
OCTO_API void octo_string_free(char* s);

/* Default geometric schedule over Euclidean R^base_dim. */
OCTO_API octo_status octo_space_create_default(size_t base_dim, size_t levels, octo_space** out);
/* Builds a space from a configuration document (schedule, base_dim,
 * tolerances, seed, output); the output section is accepted and ignored. */
OCTO_API octo_status octo_space_create_from_json(const char* config_json, octo_space** out);
OCTO_API void octo_space_destroy(octo_space* space);
OCTO_API size_t octo_space_base_dim(const octo_space* space);
OCTO_API size_t octo_space_levels(const octo_space* space);
/* Normalized configuration, including the materialized schedule. */
OCTO_API octo_status octo_space_config_json(const octo_space* space, char** out_json);

/* Vectors are passed as a base block of length base_dim plus coordinates
 * x_1..x_degree. */
OCTO_API octo_status octo_level_norm(const octo_space* space, const double* base, const double* coords,
                                     size_t degree, size_t level, double* out_value);
OCTO_API octo_status octo_tower_norm(const octo_space* space, const double* base, const double* coords,
                                     size_t degree, double* out_value);
/* Membership-bisection value of the level-n norm, independent of the solver. */
OCTO_API octo_status octo_oracle(const octo_space* space, const double* base, const double* coords,
                                 size_t degree, size_t level, double* out_value);

OCTO_API octo_status octo_shape_value(const octo_space* space, size_t level, double t, double* out_value);
OCTO_API octo_status octo_shape_derivative(const octo_space* space, size_t level, double t,
                                           double* out_value);

/* Vector arguments below are JSON objects {"base": [...], "coords": [...]}
 * or single CSV rows. */

/* Evaluation report; level 0 evaluates at the support of the vector. */
OCTO_API octo_status octo_eval_json(const octo_space* space, const char* vector, size_t level,
                                    char** out_json);
OCTO_API octo_status octo_derivative_json(const octo_space* space, const char* x, const char* h,
                                          char** out_json);
/* CSV with header theta,radius,px,py and resolution + 1 rows. */
OCTO_API octo_status octo_slice_csv(const octo_space* space, const char* u, const char* v, size_t level,
                                    size_t resolution, char** out_csv);

typedef struct octo_verify_options {
  size_t samples;     /* 0: per-check default */
  uint64_t seed;
  int has_tol;        /* nonzero: tol overrides every additive tolerance */
  double tol;
  double epsilon;     /* octahedrality target */
  size_t max_degree;
} octo_verify_options;

OCTO_API void octo_verify_options_init(octo_verify_options* options);
/* check is a check name or "all"; out_json receives an array of reports and
 * all_passed is set to 1 only when every report passed. */
OCTO_API octo_status octo_verify_json(const octo_space* space, const char* check,
                                      const octo_verify_options* options, char** out_json,
                                      int* all_passed);

/* Per-level table; format is "json" or "csv". */
OCTO_API octo_status octo_schedule_table(const octo_space* space, const char* format, char** out);

#ifdef __cplusplus
}
#endif

#endif
