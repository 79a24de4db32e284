#ifndef PHICGC_PHICGC_H
#define PHICGC_PHICGC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#if defined(PHICGC_BUILDING_SHARED)
#define PHICGC_API __declspec(dllexport)
#else
#define PHICGC_API __declspec(dllimport)
#endif
#else
#define PHICGC_API __attribute__((visibility("default")))
#endif

/* Every fallible call returns a status. On failure a message is available
 * from phicgc_last_error() on the calling thread until the next call. */
typedef enum phicgc_status {
  PHICGC_OK = 0,
  PHICGC_ERR_INVALID_ARGUMENT = 1,
  PHICGC_ERR_DIMENSION_MISMATCH = 2,
  PHICGC_ERR_NUMERICAL_RANGE = 3,
  PHICGC_ERR_NO_PROGRESS = 4,
  PHICGC_ERR_BUDGET_EXCEEDED = 5,
  PHICGC_ERR_ESTIMATOR_UNAVAILABLE = 6,
  PHICGC_ERR_IO = 7,
  PHICGC_ERR_CONFIG = 8,
  PHICGC_ERR_UNSUPPORTED = 9,
  PHICGC_ERR_INTERNAL = 10
} phicgc_status;

typedef struct phicgc_operator phicgc_operator;
typedef struct phicgc_problem phicgc_problem;
typedef struct phicgc_hierarchy phicgc_hierarchy;

PHICGC_API const char* phicgc_version(void);
PHICGC_API const char* phicgc_last_error(void);
PHICGC_API const char* phicgc_status_string(phicgc_status status);
/* Frees strings returned through char** out parameters. */
PHICGC_API void phicgc_string_free(char* s);

/* ---- operators ---------------------------------------------------------- */

/* Square CSR matrix, copied. Columns strictly increasing within each row. */
PHICGC_API phicgc_status phicgc_operator_create_csr(int64_t n, const int64_t* row_offsets, const int64_t* col_indices,
                                                    const double* values, phicgc_operator** out);
PHICGC_API phicgc_status phicgc_operator_read_matrix_market(const char* path, phicgc_operator** out);
/* CSR operators only. */
PHICGC_API phicgc_status phicgc_operator_write_matrix_market(const phicgc_operator* op, const char* path);
PHICGC_API void phicgc_operator_destroy(phicgc_operator* op);

PHICGC_API phicgc_status phicgc_operator_dim(const phicgc_operator* op, int64_t* out);
/* y = A x, counted as one matvec. x and y hold dim values and must not alias. */
PHICGC_API phicgc_status phicgc_operator_apply(const phicgc_operator* op, const double* x, double* y);
PHICGC_API phicgc_status phicgc_operator_one_norm(const phicgc_operator* op, double* out);
/* Reads the matvec counter; resets it when reset is nonzero. */
PHICGC_API phicgc_status phicgc_operator_matvec_count(const phicgc_operator* op, int reset, uint64_t* out);

/* ---- heat problems ------------------------------------------------------ */

typedef struct phicgc_problem_info {
  int64_t dim;
  int32_t rank; /* 1 or 3 */
  int64_t extents[3];
  double T;
  double rel_tol;
  double omega;
} phicgc_problem_info;

PHICGC_API phicgc_status phicgc_problem_heat1d(int64_t n, phicgc_problem** out);
PHICGC_API phicgc_status phicgc_problem_heat3d(int64_t nx, int64_t ny, int64_t nz, phicgc_problem** out);
PHICGC_API void phicgc_problem_destroy(phicgc_problem* p);
PHICGC_API phicgc_status phicgc_problem_info_get(const phicgc_problem* p, phicgc_problem_info* out);
/* Copies the initial vector and the source; either pointer may be NULL. */
PHICGC_API phicgc_status phicgc_problem_vectors(const phicgc_problem* p, double* v, double* g);
/* New handle sharing the problem's operator; destroy it separately. */
PHICGC_API phicgc_status phicgc_problem_operator(const phicgc_problem* p, phicgc_operator** out);

/* ---- grid hierarchies --------------------------------------------------- */

typedef enum phicgc_transfer_method {
  PHICGC_TRANSFER_LINEAR = 0,
  PHICGC_TRANSFER_CUBIC_SPLINE = 1
} phicgc_transfer_method;

PHICGC_API phicgc_status phicgc_hierarchy_build(const phicgc_problem* p, int32_t levels, phicgc_transfer_method method,
                                                phicgc_hierarchy** out);
PHICGC_API void phicgc_hierarchy_destroy(phicgc_hierarchy* h);
PHICGC_API phicgc_status phicgc_hierarchy_depth(const phicgc_hierarchy* h, int32_t* out);
/* Level 0 is the finest grid. */
PHICGC_API phicgc_status phicgc_hierarchy_level_dim(const phicgc_hierarchy* h, int32_t level, int64_t* out);

/* ---- solvers ------------------------------------------------------------ */

typedef struct phicgc_phi_result {
  uint64_t matvecs;
  uint64_t restarts;
  double residual_bound;
  double omega_ritz;
  double beta;
} phicgc_phi_result;

/* y = v + T phi(-T A)(g - A v) to relative residual rel_tol. info may be NULL. */
PHICGC_API phicgc_status phicgc_phi_solve(const phicgc_operator* op, const double* v, const double* g, double T,
                                          double rel_tol, int32_t max_dim, double* y, phicgc_phi_result* info);

#define PHICGC_MAX_LEVELS 16

typedef enum phicgc_coarse_solver { PHICGC_SOLVER_PHIRT = 0, PHICGC_SOLVER_RESIDUAL_RESTART = 1 } phicgc_coarse_solver;
typedef enum phicgc_omega_source {
  PHICGC_OMEGA_HIERARCHY = 0,
  PHICGC_OMEGA_RITZ = 1,
  PHICGC_OMEGA_ZERO = 2
} phicgc_omega_source;

typedef struct phicgc_cgc_options {
  double rel_tol;
  int32_t num_levels;
  int32_t krylov_max_dim;
  int32_t coarse_solver;   /* phicgc_coarse_solver */
  int32_t estimate_enabled;
  int32_t omega_source;    /* phicgc_omega_source */
} phicgc_cgc_options;

typedef struct phicgc_level_report {
  uint64_t matvecs;
  double beta;
  double effective_rel_tol;
  double residual_bound;
  double coarse_error_estimate; /* valid when has_estimate */
  double omega_used;
  int32_t solved;
  int32_t has_estimate;
} phicgc_level_report;

typedef struct phicgc_cgc_report {
  int32_t num_levels;
  double beta_root;
  double rel_tol_root;
  double total_estimate;
  uint64_t estimate_matvecs;
  uint64_t total_matvecs;
  phicgc_level_report levels[PHICGC_MAX_LEVELS];
} phicgc_cgc_report;

PHICGC_API void phicgc_cgc_options_default(phicgc_cgc_options* options);
/* Multigrid coarse grid correction on the hierarchy. On a failure inside a
 * level the message starts with "level <k>:" (1 = finest). report may be NULL. */
PHICGC_API phicgc_status phicgc_cgc_solve(const phicgc_hierarchy* h, const double* v, const double* g, double t,
                                          const phicgc_cgc_options* options, double* y, phicgc_cgc_report* report);

/* Tight-tolerance Krylov reference on the problem's own grid. */
PHICGC_API phicgc_status phicgc_reference_solution(const phicgc_problem* p, double t, double* y);
PHICGC_API phicgc_status phicgc_relative_error(const double* y, const double* y_ref, int64_t n, double* out);

/* ---- experiments -------------------------------------------------------- */

/* Runs the JSON-configured experiment and writes <name>.csv and <name>.md to
 * the configured output directory. Either out pointer may be NULL. */
PHICGC_API phicgc_status phicgc_run_experiment(const char* config_path, char** markdown_out, char** csv_path_out);

typedef void (*phicgc_check_callback)(const char* name, int passed, const char* detail, double seconds, void* user);

/* suite: 0 fast, 1 full. coarse_tolerance_skew other than 1 injects a fault
 * into the tolerance propagation. */
PHICGC_API phicgc_status phicgc_verify(int32_t suite, uint64_t seed, double coarse_tolerance_skew,
                                       phicgc_check_callback callback, void* user, int32_t* failures_out);

PHICGC_API phicgc_status phicgc_format_table(const char* const* csv_paths, int32_t count, int32_t markdown,
                                             char** out);

#ifdef __cplusplus
}
#endif

#endif
