#ifndef DUPMATCH_H
#define DUPMATCH_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define DM_ENGINE_AUTO 0

#define DM_ENGINE_GS 1

#define DM_ENGINE_KERNEL 2

#define DM_CONSTRUCTION_AUTO 0

#define DM_CONSTRUCTION_SIMPLE 1

#define DM_CONSTRUCTION_GENERAL 2

/*
 Default brute-force edge limit for [`dm_certify`].
 */
#define DM_DEFAULT_CAP 20

typedef enum DmStatus {
  DM_STATUS_OK = 0,
  DM_STATUS_NULL_POINTER = 1,
  DM_STATUS_INVALID_UTF8 = 2,
  /*
   Malformed JSON or numbers.
   */
  DM_STATUS_PARSE_ERROR = 3,
  /*
   Well-formed but violates the model (ranges, thresholds, matroid axioms).
   */
  DM_STATUS_INVALID_INSTANCE = 4,
  /*
   `DM_ENGINE_GS` on an instance that is not one-to-one.
   */
  DM_STATUS_ENGINE_MISMATCH = 5,
  /*
   Brute force was asked for more edges than the cap allows.
   */
  DM_STATUS_CAP_EXCEEDED = 6,
  /*
   Unknown engine or construction code, or a repeated edge id.
   */
  DM_STATUS_BAD_ARGUMENT = 7,
  DM_STATUS_PANIC = 8,
} DmStatus;

/*
 Opaque instance handle.
 */
typedef struct DmInstance DmInstance;

/*
 Opaque solution handle.
 */
typedef struct DmSolution DmSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version, a static nul-terminated string.
 */
const char *dm_version(void);

/*
 Message for the last failed call on this thread, or NULL after a success.
 The pointer stays valid until the next call into the library on this thread.
 */
const char *dm_last_error(void);

/*
 Parses and validates an instance. On success `*out` owns a new handle.

 # Safety
 `json` must be NULL or a nul-terminated string; `out` must be NULL or writable.
 */
enum DmStatus dm_instance_from_json(const char *json, struct DmInstance **out);

/*
 # Safety
 `inst` must be NULL or a handle from [`dm_instance_from_json`] not yet freed.
 */
void dm_instance_free(struct DmInstance *inst);

/*
 Number of edges, 0 for NULL.

 # Safety
 `inst` must be NULL or a live handle.
 */
size_t dm_instance_edge_count(const struct DmInstance *inst);

/*
 Canonical JSON for the instance; free with [`dm_string_free`].

 # Safety
 `inst` must be NULL or a live handle; `out` must be NULL or writable.
 */
enum DmStatus dm_instance_to_json(const struct DmInstance *inst, char **out);

/*
 Solves with the given `DM_ENGINE_*` and `DM_CONSTRUCTION_*` codes.

 # Safety
 `inst` must be NULL or a live handle; `out` must be NULL or writable.
 */
enum DmStatus dm_solve(const struct DmInstance *inst,
                       uint32_t engine_code,
                       uint32_t construction_code,
                       struct DmSolution **out);

/*
 # Safety
 `sol` must be NULL or a handle from [`dm_solve`] not yet freed.
 */
void dm_solution_free(struct DmSolution *sol);

/*
 Number of matched edges, 0 for NULL.

 # Safety
 `sol` must be NULL or a live handle.
 */
size_t dm_solution_size(const struct DmSolution *sol);

/*
 Matched edges at critical vertices, 0 for NULL.

 # Safety
 `sol` must be NULL or a live handle.
 */
size_t dm_solution_criticality_score(const struct DmSolution *sol);

/*
 Copies up to `capacity` matched edge ids, ascending, into `buf` and
 returns the total count. Call with `capacity` 0 to size the buffer.

 # Safety
 `sol` must be NULL or a live handle; `buf` must hold `capacity` elements.
 */
size_t dm_solution_edges(const struct DmSolution *sol, size_t *buf, size_t capacity);

/*
 The full solve report as JSON; free with [`dm_string_free`].

 # Safety
 `sol` must be NULL or a live handle; `out` must be NULL or writable.
 */
enum DmStatus dm_solution_to_json(const struct DmSolution *sol, char **out);

/*
 Checks `edges[0..len]` by brute force over all feasible matchings, which
 is refused above `cap` edges. `*stable` receives the verdict; if
 `certificate` is not NULL it receives the certificate JSON.

 # Safety
 `inst` must be NULL or a live handle; `edges` must hold `len` elements
 (it may be NULL when `len` is 0); the out pointers must be NULL or writable.
 */
enum DmStatus dm_certify(const struct DmInstance *inst,
                         const size_t *edges,
                         size_t len,
                         size_t cap,
                         bool *stable,
                         char **certificate);

/*
 Releases a string returned by this library. NULL is ignored.

 # Safety
 `s` must be NULL or a string from this library not yet freed.
 */
void dm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DUPMATCH_H */
