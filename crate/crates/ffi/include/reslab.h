#ifndef RESLAB_H
#define RESLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ReslabStatus {
  RESLAB_STATUS_OK = 0,
  RESLAB_STATUS_NULL_POINTER = 1,
  RESLAB_STATUS_INVALID_ARGUMENT = 2,
  RESLAB_STATUS_DIMENSION = 3,
  RESLAB_STATUS_ARITY = 4,
  RESLAB_STATUS_UNSUPPORTED = 5,
  RESLAB_STATUS_OVERFLOW = 6,
  RESLAB_STATUS_PRECONDITION = 7,
  RESLAB_STATUS_QUERY = 8,
  RESLAB_STATUS_DEGENERATE_INPUT = 9,
  RESLAB_STATUS_BUDGET = 10,
  RESLAB_STATUS_DIVERGENCE = 11,
  RESLAB_STATUS_IO = 12,
  RESLAB_STATUS_PANIC = 13,
} ReslabStatus;

typedef enum ReslabClass {
  RESLAB_CLASS_NOT_IN_A = 0,
  RESLAB_CLASS_IN_A1 = 1,
  RESLAB_CLASS_IN_A2 = 2,
  RESLAB_CLASS_IN_A3 = 3,
  RESLAB_CLASS_IN_A_CUBIC = 4,
} ReslabClass;

/**
 * Opaque finitely supported field on `Z^d`.
 */
typedef struct ReslabField ReslabField;

/**
 * Counting request; radii a lemma does not use are ignored.
 */
typedef struct ReslabCountQuery {
  /**
   * NUL-terminated lemma name, e.g. "NumberA".
   */
  const char *tag;
  size_t d;
  /**
   * `d` coordinates each, or null for the origin.
   */
  const int64_t *n_star;
  const int64_t *n_sub;
  const int64_t *ball_center;
  int64_t mu_star;
  double radius;
  double r1;
  double r2;
  double r3;
  double eta;
} ReslabCountQuery;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *reslab_last_error(void);

/**
 * Empty field on the box `|n|_inf <= box_radius` in `Z^d`.
 */
enum ReslabStatus reslab_field_new(size_t d, int64_t box_radius, struct ReslabField **out_field);

/**
 * Releases a field; null is ignored.
 *
 * # Safety
 * `field` must come from this library and not be used afterwards.
 */
void reslab_field_free(struct ReslabField *field);

/**
 * # Safety
 * `field` must be a live handle; `coords` must point to `dim` values.
 */
enum ReslabStatus reslab_field_set(struct ReslabField *field,
                                   const int64_t *coords,
                                   double re,
                                   double im);

/**
 * # Safety
 * `field` must be a live handle; `coords` must point to `dim` values.
 */
enum ReslabStatus reslab_field_get(const struct ReslabField *field,
                                   const int64_t *coords,
                                   double *out_re,
                                   double *out_im);

/**
 * Support size, or 0 for null.
 *
 * # Safety
 * `field` must be null or a live handle.
 */
size_t reslab_field_len(const struct ReslabField *field);

/**
 * Dimension, or 0 for null.
 *
 * # Safety
 * `field` must be null or a live handle.
 */
size_t reslab_field_dim(const struct ReslabField *field);

/**
 * `||f||_{l^p_s}`; pass `p = INFINITY` for the sup norm.
 *
 * # Safety
 * `field` must be a live handle.
 */
enum ReslabStatus reslab_field_norm(const struct ReslabField *field,
                                    double p,
                                    double s,
                                    double *out_norm);

/**
 * Resonance function of the output `n` against a `(2k+1)`-tuple.
 *
 * # Safety
 * `n` must hold `d` values and `tuple_coords` `tuple_len * d` values.
 */
enum ReslabStatus reslab_phi(size_t d,
                             const int64_t *n,
                             const int64_t *tuple_coords,
                             size_t tuple_len,
                             int64_t *out_phi);

/**
 * Exceptional-set class of a `(2k+1)`-tuple; `out_ranks`, if not null,
 * receives the 0-based slot of `n_[m]` at index `m - 1`.
 *
 * # Safety
 * `tuple_coords` must hold `(2k+1) * d` values and `out_ranks`, if not null,
 * room for `2k+1` values.
 */
enum ReslabStatus reslab_classify(size_t d,
                                  size_t k,
                                  const int64_t *tuple_coords,
                                  enum ReslabClass *out_class,
                                  size_t *out_ranks);

/**
 * Exact count and the lemma's bound (constant 1).
 *
 * # Safety
 * `query` must be valid; its vector pointers null or holding `d` values.
 */
enum ReslabStatus reslab_count(const struct ReslabCountQuery *query,
                               uint64_t *out_count,
                               double *out_bound);

enum ReslabStatus reslab_divisor_count(int64_t n, uint64_t *out_count);

/**
 * Sets `out_holds` to 1 when `lcm(a,b,c) gcd(a,b) gcd(a,c) gcd(b,c) = abc gcd(a,b,c)`.
 */
enum ReslabStatus reslab_lcm_gcd_identity(uint64_t a, uint64_t b, uint64_t c, int32_t *out_holds);

/**
 * Estimate ratio LHS/RHS for the named estimate. `q = 0` minimizes over the
 * distinguished slot; `has_mu = 0` takes the supremum over levels.
 *
 * # Safety
 * `tag` must be a NUL-terminated string and `field_handles` hold `count` live handles.
 */
enum ReslabStatus reslab_estimate_ratio(const char *tag,
                                        double s,
                                        size_t q,
                                        int32_t has_mu,
                                        int64_t mu,
                                        const struct ReslabField *const *field_handles,
                                        size_t count,
                                        double *out_ratio);

/**
 * The three fields of the `l^inf` counterexample family (`d = 2, k = 1`).
 *
 * # Safety
 * `out_fields` must have room for three handles.
 */
enum ReslabStatus reslab_counterexample(int64_t big_n, struct ReslabField **out_fields);

/**
 * Integrates the truncated flow to `t_end` with RK4 steps of at most `dt`
 * and returns the final state as a new field. `splitting` is "Full",
 * "PrincipalAc" or "RemainderR" (null means "Full").
 *
 * # Safety
 * `omega0` must be a live handle; `splitting` null or NUL-terminated.
 */
enum ReslabStatus reslab_evolve(size_t k,
                                double lambda_re,
                                double lambda_im,
                                int64_t box_radius,
                                const char *splitting,
                                const struct ReslabField *omega0,
                                double t_end,
                                double dt,
                                struct ReslabField **out_field);

/**
 * Mass `sum |w|^2` and `||w||_{l^2_s}`.
 *
 * # Safety
 * `field` must be a live handle.
 */
enum ReslabStatus reslab_observables(const struct ReslabField *field,
                                     double s,
                                     double *out_mass,
                                     double *out_sobolev);

/**
 * Writes the binary state dump.
 *
 * # Safety
 * `field` must be a live handle and `path` NUL-terminated.
 */
enum ReslabStatus reslab_field_dump(const struct ReslabField *field, size_t k, const char *path);

/**
 * Reads a binary state dump into a new field.
 *
 * # Safety
 * `path` must be NUL-terminated.
 */
enum ReslabStatus reslab_field_load(const char *path,
                                    size_t *out_k,
                                    struct ReslabField **out_field);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RESLAB_H */
