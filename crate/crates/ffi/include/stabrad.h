#ifndef STABRAD_H
#define STABRAD_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum StabradIntegrator {
  STABRAD_INTEGRATOR_SPLITTING = 0,
  STABRAD_INTEGRATOR_FULL_EULER = 1,
} StabradIntegrator;

typedef enum StabradOuterStatus {
  STABRAD_OUTER_STATUS_CONVERGED = 0,
  STABRAD_OUTER_STATUS_MAX_ITERATIONS = 1,
  STABRAD_OUTER_STATUS_ALREADY_UNSTABLE = 2,
} StabradOuterStatus;

// Which extremal matrix to copy out of a result.
typedef enum StabradPerturbation {
  // Unit rank-1 direction `E = u v*`.
  STABRAD_PERTURBATION_E = 0,
  // Structured perturbation `Delta`.
  STABRAD_PERTURBATION_DELTA = 1,
  // Unstructured perturbation `Theta = eps E`.
  STABRAD_PERTURBATION_THETA = 2,
} StabradPerturbation;

typedef enum StabradStatus {
  STABRAD_STATUS_OK = 0,
  STABRAD_STATUS_NULL_POINTER = 1,
  STABRAD_STATUS_INVALID_ARGUMENT = 3,
  STABRAD_STATUS_PARSE = 4,
  STABRAD_STATUS_UNSUPPORTED_FIELD = 5,
  STABRAD_STATUS_IO = 6,
  STABRAD_STATUS_DIMENSION_MISMATCH = 7,
  STABRAD_STATUS_NON_FINITE = 8,
  STABRAD_STATUS_NOT_HURWITZ = 9,
  STABRAD_STATUS_TOO_LARGE = 10,
  STABRAD_STATUS_NON_CONVERGENCE = 11,
  STABRAD_STATUS_DEGENERATE_EIGENVALUE = 12,
  STABRAD_STATUS_ZERO_STRUCTURED_PART = 13,
  STABRAD_STATUS_ZERO_STRUCTURED_GRADIENT = 14,
  STABRAD_STATUS_EXCEPTIONAL_STATIONARY_POINT = 15,
  STABRAD_STATUS_INVALID_STRUCTURE = 16,
  STABRAD_STATUS_CONTOUR_ESCAPES_WINDOW = 17,
  STABRAD_STATUS_OPEN_CONTOUR = 18,
  STABRAD_STATUS_STEP_SIZE_UNSTABLE = 19,
  STABRAD_STATUS_SERIALIZATION = 20,
  STABRAD_STATUS_PANIC = 99,
} StabradStatus;

// Dense square complex matrix together with its declared sparsity pattern.
typedef struct StabradMatrix StabradMatrix;

// Outcome of an outer iteration, with the extremal perturbation.
typedef struct StabradRadiusResult StabradRadiusResult;

// Structure space for the perturbation.
typedef struct StabradStructure StabradStructure;

// Solver options; obtain defaults from [`stabrad_options_default`].
typedef struct StabradOptions {
  size_t restarts;
  bool both_signs;
  uint64_t seed;
  size_t max_inner_steps;
  size_t max_outer_iterations;
  enum StabradIntegrator integrator;
} StabradOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *stabrad_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *stabrad_version(void);

// Builds an `n x n` matrix from row-major arrays; `im` may be NULL for a
// real matrix. The pattern is the set of nonzero entries.
//
// # Safety
// `re` (and `im` when not NULL) must point to `n * n` doubles.
struct StabradMatrix *stabrad_matrix_new(size_t n, const double *re, const double *im);

// `-Grcar(n) - shift I`.
struct StabradMatrix *stabrad_matrix_grcar(size_t n, double shift);

// Reads a square Matrix Market file; stored entries, including explicit
// zeros, form the pattern.
//
// # Safety
// `path` must be a NUL-terminated string.
struct StabradMatrix *stabrad_matrix_read_mm(const char *path);

// Dimension `n`, or 0 for NULL.
//
// # Safety
// `m` must be NULL or a live handle.
size_t stabrad_matrix_dim(const struct StabradMatrix *m);

// # Safety
// `m` must be NULL or a handle not yet freed.
void stabrad_matrix_free(struct StabradMatrix *m);

// Real perturbations on the pattern of `m`.
//
// # Safety
// `m` must be NULL or a live handle.
struct StabradStructure *stabrad_structure_sparsity_real(const struct StabradMatrix *m);

// Complex perturbations on the pattern of `m`.
//
// # Safety
// `m` must be NULL or a live handle.
struct StabradStructure *stabrad_structure_sparsity_complex(const struct StabradMatrix *m);

struct StabradStructure *stabrad_structure_full_real(size_t n);

struct StabradStructure *stabrad_structure_full_complex(size_t n);

// Real Toeplitz matrices with diagonals `-lower..=upper`.
struct StabradStructure *stabrad_structure_toeplitz_real(size_t n, size_t lower, size_t upper);

// # Safety
// `s` must be NULL or a handle not yet freed.
void stabrad_structure_free(struct StabradStructure *s);

struct StabradOptions stabrad_options_default(void);

// Structured radius `delta` for fixed `eps`. `opts` may be NULL for defaults.
//
// # Safety
// Handles must be live; `out` must be writable.
enum StabradStatus stabrad_solve_delta(const struct StabradMatrix *a,
                                       const struct StabradStructure *s,
                                       double eps,
                                       const struct StabradOptions *opts,
                                       struct StabradRadiusResult **out);

// Largest `eps` for fixed `delta`. `opts` may be NULL for defaults.
//
// # Safety
// Handles must be live; `out` must be writable.
enum StabradStatus stabrad_solve_eps(const struct StabradMatrix *a,
                                     const struct StabradStructure *s,
                                     double delta,
                                     const struct StabradOptions *opts,
                                     struct StabradRadiusResult **out);

// Unstructured stability radius `eps*`.
//
// # Safety
// `a` must be live; `out` must be writable.
enum StabradStatus stabrad_stability_radius(const struct StabradMatrix *a,
                                            const struct StabradOptions *opts,
                                            struct StabradRadiusResult **out);

// Final `delta` (delta mode) or `eps` (eps mode); NaN for NULL.
//
// # Safety
// `r` must be NULL or a live handle.
double stabrad_result_value(const struct StabradRadiusResult *r);

// `eps` of the final state; NaN for NULL.
//
// # Safety
// `r` must be NULL or a live handle.
double stabrad_result_eps(const struct StabradRadiusResult *r);

// `delta` of the final state; NaN for NULL.
//
// # Safety
// `r` must be NULL or a live handle.
double stabrad_result_delta(const struct StabradRadiusResult *r);

// True when the result solved for `eps` rather than `delta`.
//
// # Safety
// `r` must be NULL or a live handle.
bool stabrad_result_is_eps_mode(const struct StabradRadiusResult *r);

// # Safety
// `r` must be a live handle.
enum StabradOuterStatus stabrad_result_status(const struct StabradRadiusResult *r);

// Number of outer iterations; 0 for NULL.
//
// # Safety
// `r` must be NULL or a live handle.
size_t stabrad_result_iterations(const struct StabradRadiusResult *r);

// Row `k` (0-based) of the outer trace. Output pointers may be NULL.
//
// # Safety
// `r` must be live; non-NULL outputs must be writable.
enum StabradStatus stabrad_result_row(const struct StabradRadiusResult *r,
                                      size_t k,
                                      double *value,
                                      double *re_lambda,
                                      size_t *steps);

// Rightmost eigenvalue of the final perturbed matrix.
//
// # Safety
// `r` must be live; outputs must be writable.
enum StabradStatus stabrad_result_eigenvalue(const struct StabradRadiusResult *r,
                                             double *re,
                                             double *im);

// Copies an extremal matrix into row-major `re` and `im` arrays of `n * n` doubles.
//
// # Safety
// `r` must be live; `re` and `im` must hold `n * n` doubles.
enum StabradStatus stabrad_result_perturbation(const struct StabradRadiusResult *r,
                                               enum StabradPerturbation which,
                                               double *re,
                                               double *im);

// JSON report of the result; release with [`stabrad_string_free`]. NULL on failure.
//
// # Safety
// `r` must be NULL or a live handle.
char *stabrad_result_to_json(const struct StabradRadiusResult *r);

// # Safety
// `s` must be NULL or a string returned by this library and not yet freed.
void stabrad_string_free(char *s);

// # Safety
// `r` must be NULL or a handle not yet freed.
void stabrad_result_free(struct StabradRadiusResult *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STABRAD_H */
