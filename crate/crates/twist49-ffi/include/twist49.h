#ifndef TWIST49_H
#define TWIST49_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every API call.
 */
typedef enum Twist49Status {
  Twist49Status_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  Twist49Status_NullArgument = 1,
  /**
   * The label fails the domain preconditions (zero, not squarefree,
   * divisible by 7, wrong residue class, out of range, ...).
   */
  Twist49Status_InvalidLabel = 2,
  /**
   * A numerical pipeline could not resolve the value (snap instability,
   * insufficient convergence, calibration failure).
   */
  Twist49Status_Numeric = 3,
  /**
   * The instance is valid but outside the regime of the requested
   * prediction.
   */
  Twist49Status_OutsideRegime = 4,
  /**
   * An internal invariant failed; treat as a bug, not bad input.
   */
  Twist49Status_Internal = 5,
} Twist49Status;

/**
 * Opaque owner of the L-series evaluator state.
 */
typedef struct Twist49Evaluator Twist49Evaluator;

/**
 * Opaque owner of the modular parametrization of X0(49).
 */
typedef struct Twist49Parametrization Twist49Parametrization;

/**
 * One central L-value or derivative record.
 */
typedef struct Twist49LValue {
  int64_t m;
  int64_t conductor;
  int32_t root_number;
  double l_numeric;
  double l_prime_numeric;
  uint8_t has_l_prime;
  double omega;
  int64_t lalg_num;
  int64_t lalg_den;
  uint8_t has_lalg;
  int32_t ord2;
  uint8_t has_ord2;
  uint64_t terms_used;
  double error_bound;
} Twist49LValue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version of the library, as a static NUL-terminated string.
 */
const char *twist49_version(void);

/**
 * Static human-readable name of a status code.
 */
const char *twist49_status_name(enum Twist49Status status);

/**
 * Creates an evaluator handle.  Never fails; free with
 * `twist49_evaluator_free`.
 */
struct Twist49Evaluator *twist49_evaluator_new(void);

/**
 * Releases an evaluator handle.  Null is a no-op.
 */
void twist49_evaluator_free(struct Twist49Evaluator *handle);

/**
 * Root number of the twist A^(M); returns 0 for invalid labels.
 */
int32_t twist49_root_number(int64_t m);

/**
 * Central value L(A^(M), 1) with the rational snap of L/Omega.
 */
enum Twist49Status twist49_l_central(const struct Twist49Evaluator *handle,
                                     int64_t m,
                                     struct Twist49LValue *out);

/**
 * Derivative L'(A^(M), 1) for twists of root number -1.
 */
enum Twist49Status twist49_l_derivative(const struct Twist49Evaluator *handle,
                                        int64_t m,
                                        struct Twist49LValue *out);

/**
 * Class group of the quadratic discriminant: order and 2/4/8-ranks.
 */
enum Twist49Status twist49_class_group(int64_t disc,
                                       uint64_t *out_h,
                                       uint32_t *out_h2,
                                       uint32_t *out_h4,
                                       uint32_t *out_h8);

/**
 * Dimensions of the two isogeny Selmer groups of A^(M) and, when the
 * parity theorem pins it, of the 2-Selmer group (otherwise dim2 = -1).
 */
enum Twist49Status twist49_selmer_dims(int64_t m,
                                       uint32_t *out_phi_quotient,
                                       uint32_t *out_phihat,
                                       int32_t *out_dim2);

/**
 * The BSD-predicted ord_2 of the algebraic central value, given an assumed
 * 2-adic valuation of Sha.  Only defined for M > 0, M = 1 mod 4, odd,
 * coprime to 7.
 */
enum Twist49Status twist49_bsd_predicted_ord2(int64_t m, int64_t sha2_ord, int64_t *out);

/**
 * The Gross-point character sum y_d for the field Q(sqrt(-7n)), with the
 * test vector matched to chi^(n).  Also reports delta (0 iff n is a QR
 * mod 7) and the class number of the field.
 */
enum Twist49Status twist49_waldspurger_y(int64_t n,
                                         int64_t d,
                                         int64_t *out_y,
                                         uint8_t *out_delta,
                                         uint64_t *out_class_number);

/**
 * Creates a parametrization handle for X0(49); returns null when the
 * period pipeline fails.  Free with `twist49_parametrization_free`.
 */
struct Twist49Parametrization *twist49_parametrization_new(void);

/**
 * Releases a parametrization handle.  Null is a no-op.
 */
void twist49_parametrization_free(struct Twist49Parametrization *handle);

/**
 * Character-weighted Heegner trace for Q(sqrt(-l0)) and conductor r*n.
 * `use_chi_r` selects the genus character attached to r instead of the
 * trivial one.  Writes whether the trace is non-torsion, whether it lies
 * in the minus eigenspace of conjugation mod torsion, and the orbit size.
 */
enum Twist49Status twist49_heegner_trace(const struct Twist49Parametrization *handle,
                                         int64_t l0,
                                         int64_t r,
                                         int64_t n,
                                         uint8_t use_chi_r,
                                         uint8_t *out_nontorsion,
                                         uint8_t *out_minus_eigen,
                                         uint64_t *out_orbit_size);

/**
 * Kronecker symbol, exposed for eligibility rechecks on the C side.
 */
int32_t twist49_kronecker(int64_t a, int64_t n);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TWIST49_H */
