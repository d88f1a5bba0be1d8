#ifndef ENTCERT_H
#define ENTCERT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EntcertStatus {
  ENTCERT_STATUS_OK = 0,
  ENTCERT_STATUS_NULL_POINTER = 1,
  ENTCERT_STATUS_INVALID_ARGUMENT = 2,
  ENTCERT_STATUS_DIMENSION = 3,
  ENTCERT_STATUS_NOT_PSD = 4,
  ENTCERT_STATUS_NUMERICAL = 5,
  ENTCERT_STATUS_PRECONDITION = 6,
  ENTCERT_STATUS_SEARCH_EXHAUSTED = 7,
  ENTCERT_STATUS_PARSE = 8,
  ENTCERT_STATUS_IO = 9,
  ENTCERT_STATUS_PANIC = 10,
} EntcertStatus;

typedef enum EntcertVerdict {
  ENTCERT_VERDICT_SEPARABLE = 0,
  ENTCERT_VERDICT_PPT = 1,
  ENTCERT_VERDICT_PPT_ENTANGLED = 2,
  ENTCERT_VERDICT_DISTILLABLE = 3,
  ENTCERT_VERDICT_UNDECIDED = 4,
} EntcertVerdict;

// Opaque certificate, together with the state it certifies.
typedef struct EntcertCertificate EntcertCertificate;

// Opaque bipartite state.
typedef struct EntcertState EntcertState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next failing call on the same thread.
const char *entcert_last_error(void);

// Library version as a static NUL-terminated string.
const char *entcert_version(void);

// Build a state from row-major real and imaginary parts of a
// `(dim_a·dim_b)²` matrix. `im` may be null for a real matrix.
//
// # Safety
// `re` (and `im` when non-null) must point to `(dim_a·dim_b)²` doubles;
// `out` must be writable.
enum EntcertStatus entcert_state_new(size_t dim_a,
                                     size_t dim_b,
                                     const double *re,
                                     const double *im,
                                     struct EntcertState **out);

// Load a bipartite state (or bipartite fixture) from a state file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum EntcertStatus entcert_state_from_file(const char *path, struct EntcertState **out);

// # Safety
// `state` must come from this library (or be null) and not be used afterwards.
void entcert_state_free(struct EntcertState *state);

// # Safety
// `state` must be a live handle; `dim_a`, `dim_b`, `rank` writable.
enum EntcertStatus entcert_state_shape(const struct EntcertState *state,
                                       size_t *dim_a,
                                       size_t *dim_b,
                                       size_t *rank);

// PPT test; `min_eig` receives the smallest partial-transpose eigenvalue.
//
// # Safety
// `state` must be a live handle; `ppt` and `min_eig` writable.
enum EntcertStatus entcert_is_ppt(const struct EntcertState *state, bool *ppt, double *min_eig);

// Full analysis with the default search budget and the given seed.
//
// # Safety
// `state` must be a live handle; `out` writable.
enum EntcertStatus entcert_analyze(const struct EntcertState *state,
                                   uint64_t seed,
                                   struct EntcertCertificate **out);

// # Safety
// `cert` must be a live handle; `out` writable.
enum EntcertStatus entcert_certificate_verdict(const struct EntcertCertificate *cert,
                                               enum EntcertVerdict *out);

// Re-check the certificate against its state.
//
// # Safety
// `cert` must be a live handle.
enum EntcertStatus entcert_certificate_validate(const struct EntcertCertificate *cert);

// Certificate as JSON; release the string with [`entcert_string_free`].
//
// # Safety
// `cert` must be a live handle; `out` writable.
enum EntcertStatus entcert_certificate_json(const struct EntcertCertificate *cert, char **out);

// # Safety
// `cert` must come from this library (or be null) and not be used afterwards.
void entcert_certificate_free(struct EntcertCertificate *cert);

// # Safety
// `s` must come from this library (or be null).
void entcert_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTCERT_H */
