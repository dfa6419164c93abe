#ifndef QESF_H
#define QESF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QesfClass {
  QESF_CLASS_EXACTLY_SOLVABLE = 0,
  QESF_CLASS_QES_TYPE1 = 1,
  QESF_CLASS_QES_TYPE2 = 2,
  QESF_CLASS_QES_HIGHER_TYPE = 3,
  QESF_CLASS_QES_SINGULARITY_INDUCED = 4,
} QesfClass;

typedef enum QesfStatus {
  QESF_STATUS_OK = 0,
  QESF_STATUS_NULL_POINTER = 1,
  QESF_STATUS_INVALID_UTF8 = 2,
  QESF_STATUS_PARSE = 3,
  QESF_STATUS_INVALID_MODEL = 4,
  QESF_STATUS_UNKNOWN_ENTRY = 5,
  QESF_STATUS_SOLVER = 6,
  QESF_STATUS_NO_BRANCHES = 7,
  QESF_STATUS_VERIFICATION = 8,
  QESF_STATUS_OUT_OF_RANGE = 9,
  QESF_STATUS_BUFFER_TOO_SMALL = 10,
  QESF_STATUS_PANIC = 11,
} QesfStatus;

// Branches found for a model, sorted by energy.
typedef struct QesfBranches QesfBranches;

// A model ready to solve.
typedef struct QesfModel QesfModel;

// Outcome of certifying one branch.
typedef struct QesfVerification {
  double residual_max;
  double residual_rms;
  size_t node_count;
  bool normalizable;
  bool pass;
} QesfVerification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or "" if none.
// Valid until the next failing call on the same thread.
const char *qesf_last_error(void);

// Builds a model from a JSON config (same format as the CLI).
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum QesfStatus qesf_model_from_json(const char *json, struct QesfModel **out);

// Builds a catalog model. `params_json` is a JSON object of parameter
// overrides and may be null.
//
// # Safety
// String arguments must be NUL-terminated (or null where allowed) and
// `out` a valid pointer.
enum QesfStatus qesf_model_from_catalog(const char *name,
                                        const char *params_json,
                                        size_t n,
                                        struct QesfModel **out);

// # Safety
// `model` must come from a `qesf_model_*` constructor or be null.
void qesf_model_free(struct QesfModel *model);

// # Safety
// `model` and `out` must be valid pointers.
enum QesfStatus qesf_model_n(const struct QesfModel *model, size_t *out);

// # Safety
// `model` and `out` must be valid pointers.
enum QesfStatus qesf_model_classify(const struct QesfModel *model, enum QesfClass *out);

// Enumerates real branches. `seed` is used when `use_seed` is true,
// otherwise a hash of the model. `attempts = 0` selects the default.
//
// # Safety
// `model` and `out` must be valid pointers.
enum QesfStatus qesf_solve(const struct QesfModel *model,
                           size_t attempts,
                           bool use_seed,
                           uint64_t seed,
                           struct QesfBranches **out);

// # Safety
// `branches` must come from [`qesf_solve`] or be null.
void qesf_branches_free(struct QesfBranches *branches);

// Number of branches, 0 for a null handle.
//
// # Safety
// `branches` must be valid or null.
size_t qesf_branches_count(const struct QesfBranches *branches);

// Energy of branch `i`, after the model's reference shift.
//
// # Safety
// `branches` and `out` must be valid pointers.
enum QesfStatus qesf_branch_energy(const struct QesfBranches *branches, size_t i, double *out);

// Copies the roots of branch `i` into `buf` (capacity `cap`) and stores
// the root count in `len`. Returns `BufferTooSmall` with `len` set when
// `cap` is insufficient; `buf` may be null when `cap` is 0.
//
// # Safety
// `buf` must hold `cap` doubles; `branches` and `len` must be valid.
enum QesfStatus qesf_branch_roots(const struct QesfBranches *branches,
                                  size_t i,
                                  double *buf,
                                  size_t cap,
                                  size_t *len);

// Max-norm residual of the root equations for branch `i`.
//
// # Safety
// `branches` and `out` must be valid pointers.
enum QesfStatus qesf_branch_residual(const struct QesfBranches *branches, size_t i, double *out);

// Certifies branch `i` on a grid of `grid_points` points (0 selects the
// default). A failed certification still returns `Ok` with `pass` false.
//
// # Safety
// `branches` and `out` must be valid pointers.
enum QesfStatus qesf_branch_verify(const struct QesfBranches *branches,
                                   size_t i,
                                   size_t grid_points,
                                   struct QesfVerification *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QESF_H */
