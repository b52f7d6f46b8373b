#ifndef QDESIGN_H
#define QDESIGN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QdStatus {
  QD_STATUS_OK = 0,
  QD_STATUS_INVALID_ARGUMENT = 1,
  QD_STATUS_NULL_POINTER = 2,
  QD_STATUS_GUARD_EXCEEDED = 3,
  QD_STATUS_TIMEOUT = 4,
  QD_STATUS_OVERFLOW = 5,
  QD_STATUS_OUT_OF_RANGE = 6,
  QD_STATUS_PANIC = 7,
} QdStatus;

/**
 * A design: orbit representatives under a group, or a set design.
 */
typedef struct QdDesign QdDesign;

/**
 * A finite field GF(q).
 */
typedef struct QdField QdField;

/**
 * A Kramer-Mesner matrix together with its group.
 */
typedef struct QdKm QdKm;

/**
 * Result of a solver run.
 */
typedef struct QdSolutions QdSolutions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. Valid until
 * the next failing call on the same thread.
 */
const char *qd_last_error_message(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void qd_string_free(char *s);

/**
 * `[n choose k]_q` into `*result`; `Overflow` when it exceeds 64 bits.
 *
 * # Safety
 * `result` must be a valid pointer.
 */
enum QdStatus qd_qbinom_u64(uint32_t n, uint32_t k, uint64_t q, uint64_t *result);

/**
 * `[n choose k]_q` in decimal, newly allocated.
 *
 * # Safety
 * `result` must be a valid pointer.
 */
enum QdStatus qd_qbinom_string(uint32_t n, uint32_t k, uint64_t q, char **result);

/**
 * Block count of the complete design on dimensions `ks[0..ks_len]`.
 *
 * # Safety
 * `ks` must point to `ks_len` values; `result` must be valid.
 */
enum QdStatus qd_lambda_max_u64(uint32_t n,
                                uint32_t t,
                                const uint32_t *ks,
                                size_t ks_len,
                                uint64_t q,
                                uint64_t *result);

/**
 * GF(q) with the default modulus.
 *
 * # Safety
 * `field` must be a valid pointer.
 */
enum QdStatus qd_field_new(uint32_t q, struct QdField **field);

/**
 * # Safety
 * `field` must be NULL or a handle from [`qd_field_new`], not yet freed.
 */
void qd_field_free(struct QdField *field);

/**
 * # Safety
 * `field` must be a live handle.
 */
uint32_t qd_field_order(const struct QdField *field);

/**
 * # Safety
 * `field` must be a live handle; `result` must be valid.
 */
enum QdStatus qd_field_add(const struct QdField *field, uint32_t a, uint32_t b, uint32_t *result);

/**
 * # Safety
 * `field` must be a live handle; `result` must be valid.
 */
enum QdStatus qd_field_mul(const struct QdField *field, uint32_t a, uint32_t b, uint32_t *result);

/**
 * # Safety
 * `field` must be a live handle; `result` must be valid.
 */
enum QdStatus qd_field_inv(const struct QdField *field, uint32_t a, uint32_t *result);

/**
 * The Borel family design in dimension `t + 4`; `q = 1` gives the set version.
 *
 * # Safety
 * `design` must be a valid pointer.
 */
enum QdStatus qd_design_family(uint32_t t, uint32_t q, struct QdDesign **design);

/**
 * Parses a design file.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `design` must be valid.
 */
enum QdStatus qd_design_from_json(const char *json, struct QdDesign **design);

/**
 * # Safety
 * `design` must be a live handle; `json` must be valid.
 */
enum QdStatus qd_design_to_json(const struct QdDesign *design, char **json);

/**
 * Declared lambda of the design.
 *
 * # Safety
 * `design` must be a live handle.
 */
uint64_t qd_design_lambda(const struct QdDesign *design);

/**
 * Expands the design and counts, for every t-subspace (or t-subset), the
 * blocks containing it. `t = 0` uses the design's own t. On success
 * `*balanced` says whether all counts agree and `*lambda` holds the common
 * count, or the most frequent one otherwise.
 *
 * # Safety
 * `design` must be a live handle; `balanced` and `lambda` must be valid.
 */
enum QdStatus qd_design_verify(const struct QdDesign *design,
                               uint32_t t,
                               uint64_t guard,
                               bool *balanced,
                               uint64_t *lambda);

/**
 * # Safety
 * `design` must be NULL or a live handle.
 */
void qd_design_free(struct QdDesign *design);

/**
 * `A_{t,K}^G` for `group` in `borel`, `singer`, `singer_frobenius`,
 * `trivial`, or a JSON group descriptor.
 *
 * # Safety
 * `group` must be a NUL-terminated string, `ks` must point to `ks_len`
 * values and `km` must be valid.
 */
enum QdStatus qd_km_new(const char *group,
                        uint32_t n,
                        uint32_t q,
                        uint32_t t,
                        const uint32_t *ks,
                        size_t ks_len,
                        uint64_t guard,
                        struct QdKm **km);

/**
 * # Safety
 * `km` must be a live handle.
 */
size_t qd_km_rows(const struct QdKm *km);

/**
 * # Safety
 * `km` must be a live handle.
 */
size_t qd_km_cols(const struct QdKm *km);

/**
 * Entry at 0-based `(row, col)`.
 *
 * # Safety
 * `km` must be a live handle; `result` must be valid.
 */
enum QdStatus qd_km_entry(const struct QdKm *km, size_t row, size_t col, uint64_t *result);

/**
 * The matrix in the JSON exchange format.
 *
 * # Safety
 * `km` must be a live handle; `json` must be valid.
 */
enum QdStatus qd_km_to_json(const struct QdKm *km, char **json);

/**
 * # Safety
 * `km` must be NULL or a live handle.
 */
void qd_km_free(struct QdKm *km);

/**
 * Solves `A x = lambda 1` over 0/1 vectors. `time_limit_secs <= 0` means
 * no limit. Returns `Timeout` with the partial result still stored in
 * `*solutions` when the limit runs out.
 *
 * # Safety
 * `km` must be a live handle; `solutions` must be valid.
 */
enum QdStatus qd_km_solve(const struct QdKm *km,
                          uint64_t lambda,
                          size_t max_solutions,
                          double time_limit_secs,
                          struct QdSolutions **solutions);

/**
 * # Safety
 * `solutions` must be a live handle.
 */
size_t qd_solutions_count(const struct QdSolutions *solutions);

/**
 * Whether the search finished (as opposed to stopping at the cap or the
 * time limit).
 *
 * # Safety
 * `solutions` must be a live handle.
 */
bool qd_solutions_complete(const struct QdSolutions *solutions);

/**
 * Copies the selected column indices of solution `index` into
 * `buf[0..cap]` and stores their number in `*len`. With `cap` too small
 * only `*len` is written and `OutOfRange` is returned.
 *
 * # Safety
 * `solutions` must be a live handle, `buf` must hold `cap` values and
 * `len` must be valid.
 */
enum QdStatus qd_solutions_columns(const struct QdSolutions *solutions,
                                   size_t index,
                                   size_t *buf,
                                   size_t cap,
                                   size_t *len);

/**
 * The design selected by solution `index`.
 *
 * # Safety
 * `solutions` must be a live handle; `design` must be valid.
 */
enum QdStatus qd_solutions_design(const struct QdSolutions *solutions,
                                  size_t index,
                                  struct QdDesign **design);

/**
 * The solver response as JSON.
 *
 * # Safety
 * `solutions` must be a live handle; `json` must be valid.
 */
enum QdStatus qd_solutions_to_json(const struct QdSolutions *solutions, char **json);

/**
 * # Safety
 * `solutions` must be NULL or a live handle.
 */
void qd_solutions_free(struct QdSolutions *solutions);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* QDESIGN_H */
