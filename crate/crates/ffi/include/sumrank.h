#ifndef SUMRANK_H
#define SUMRANK_H

/* Generated from the sumrank-ffi crate sources; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Distinguisher selector for [`srk_distinguish`].
 */
typedef enum SrkMethod {
  /**
   * Square-code dimension (θ = Id only, no side information needed).
   */
  SrkMethod_Square = 0,
  /**
   * Overbeck Γ-stack rank; needs evaluation parameters.
   */
  SrkMethod_Overbeck = 1,
  /**
   * Intersection-chain dimension; needs evaluation parameters.
   */
  SrkMethod_Intersection = 2,
} SrkMethod;

/**
 * Block-multiplier mode for [`srk_keygen`].
 */
typedef enum SrkMultipliers {
  /**
   * v = (1, …, 1): a plain LRS instance.
   */
  SrkMultipliers_Ones = 0,
  /**
   * Independent uniform nonzero multipliers.
   */
  SrkMultipliers_Random = 1,
} SrkMultipliers;

/**
 * β-recovery route selector for [`srk_recover`].
 */
typedef enum SrkRoute {
  /**
   * Try the route suited to the automorphism first, then the other.
   */
  SrkRoute_Auto = 0,
  SrkRoute_Dual = 1,
  SrkRoute_Intersection = 2,
} SrkRoute;

/**
 * Result code of every `srk_*` call.
 */
typedef enum SrkStatus {
  /**
   * Success; for distinguishers: the code looks structured.
   */
  SrkStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  SrkStatus_NullArgument = 1,
  /**
   * An input string was not valid UTF-8.
   */
  SrkStatus_Utf8 = 2,
  /**
   * Malformed JSON, inconsistent wire data, or invalid parameters.
   */
  SrkStatus_Malformed = 3,
  /**
   * Definite negative: the distinguisher statistic rules the family out.
   */
  SrkStatus_Unstructured = 4,
  /**
   * Recovery terminated without a verified parameter set.
   */
  SrkStatus_RecoveryFailed = 5,
  /**
   * No statistic could be computed (budget, depth, or precondition).
   */
  SrkStatus_Inconclusive = 6,
  /**
   * The parameter regime is outside what the operation supports.
   */
  SrkStatus_Unsupported = 7,
  /**
   * A panic was caught at the boundary; state may be stale.
   */
  SrkStatus_Internal = 8,
} SrkStatus;

/**
 * Opaque field tower F_p ⊂ F_q ⊂ F_{q^m} together with an operator context
 * (θ = φ^l, δ = γ(id − θ)).
 */
typedef struct SrkContext SrkContext;

/**
 * Opaque parsed public code: field, operator context, block composition and
 * generator matrix, as advertised by a `public_generator.json` document.
 */
typedef struct SrkPublicCode SrkPublicCode;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version of the underlying library, as a static string (do not free).
 */
const char *srk_version(void);

/**
 * Static one-line description of a status code (do not free).
 */
const char *srk_status_message(enum SrkStatus status);

/**
 * Detail message of the most recent failure on this thread, or null if none
 * was recorded. The caller owns the string (release with
 * [`srk_string_free`]).
 */
char *srk_last_error_message(void);

/**
 * Release a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `s` must be null or a pointer previously returned by an `srk_*` call.
 */
void srk_string_free(char *s);

/**
 * Build a field tower F_p ⊂ F_{p^s} ⊂ F_{(p^s)^m} with the operator context
 * θ = φ^l, δ = γ(id − θ). `gamma`/`gamma_len` give γ as ascending base-p
 * coefficients; a null or empty array means γ = 0. On success `*out` owns
 * the context (release with [`srk_context_free`]).
 *
 * # Safety
 * `gamma` must point to `gamma_len` readable values (or be null with
 * `gamma_len = 0`); `out` must be a valid pointer.
 */
enum SrkStatus srk_context_new(uint64_t p,
                               size_t s,
                               size_t m,
                               size_t theta_l,
                               const uint64_t *gamma,
                               size_t gamma_len,
                               struct SrkContext **out);

/**
 * Release a context created by [`srk_context_new`]. Null is a no-op.
 *
 * # Safety
 * `ctx` must be null or a pointer returned by [`srk_context_new`].
 */
void srk_context_free(struct SrkContext *ctx);

/**
 * Describe a context as a JSON object: `p`, `s`, `m`, `q`, `order`,
 * `theta_l`, `gamma` (coefficients), `identity_theta`, `zero_derivation`
 * and `conjugacy_classes` (number of nontrivial classes).
 *
 * # Safety
 * `ctx` must be a live context handle; `out_json` must be valid.
 */
enum SrkStatus srk_context_describe(const struct SrkContext *ctx, char **out_json);

/**
 * Sample a fresh disguised instance, seeded deterministically. The result
 * is one JSON object with fields `secret`, `public` and `disguise`, each
 * byte-compatible with the file of the same role written by the CLI
 * (`secret_params.json`, `public_generator.json`, `disguise.json`). The
 * secret holds the transported parameters, which canonically describe the
 * public code.
 *
 * # Safety
 * `ctx` must be a live context handle, `comp` must point to `comp_len`
 * readable values, and `out_json` must be valid.
 */
enum SrkStatus srk_keygen(const struct SrkContext *ctx,
                          const size_t *comp,
                          size_t comp_len,
                          size_t k,
                          enum SrkMultipliers multipliers,
                          bool semilinear,
                          uint64_t seed,
                          char **out_json);

/**
 * Parse a `public_generator.json` document into an opaque handle (release
 * with [`srk_public_free`]).
 *
 * # Safety
 * `json` must be a valid NUL-terminated string; `out` must be valid.
 */
enum SrkStatus srk_public_parse(const char *json, struct SrkPublicCode **out);

/**
 * Release a handle created by [`srk_public_parse`]. Null is a no-op.
 *
 * # Safety
 * `code` must be null or a pointer returned by [`srk_public_parse`].
 */
void srk_public_free(struct SrkPublicCode *code);

/**
 * Describe a parsed public code as a JSON object: `p`, `s`, `m`, `theta_l`,
 * `gamma`, `comp`, `n`, `k` and `generator_rank`.
 *
 * # Safety
 * `code` must be a live handle; `out_json` must be valid.
 */
enum SrkStatus srk_public_describe(const struct SrkPublicCode *code, char **out_json);

/**
 * Run one distinguisher against a parsed public code.
 *
 * `secret_json` may be null for [`SrkMethod::Square`]; the Γ-stack and
 * intersection methods need evaluation parameters and accept a
 * `secret_params.json` document. `j < 0` selects the method's default
 * depth. With `sweep_derivations` the statistic is retried over the
 * automorphism orbit of γ; with `sweep_multipliers` unknown block
 * multipliers are searched (`budget = 0` keeps the default of 10000
 * candidates).
 *
 * Returns `Ok` and writes the verdict JSON when the structured-code law
 * holds, `Unstructured` (verdict still written when `out_verdict_json` is
 * non-null) when the statistic rules the family out, `Inconclusive` when no
 * statistic could be computed.
 *
 * # Safety
 * `code` must be a live handle; `secret_json` must be null or a valid
 * string; `out_verdict_json` may be null when the verdict body is not
 * needed.
 */
enum SrkStatus srk_distinguish(const struct SrkPublicCode *code,
                               enum SrkMethod method,
                               const char *secret_json,
                               int64_t j,
                               bool sweep_derivations,
                               bool sweep_multipliers,
                               uint64_t budget,
                               char **out_verdict_json);

/**
 * Recover evaluation parameters, multipliers and code locators from a
 * parsed public code, and verify them against its row space.
 *
 * `secret_json` may carry a `secret_params.json` document whose evaluation
 * parameters and multipliers are taken as known (required when θ ≠ Id). On
 * success writes a recovery report JSON (same schema as the CLI report:
 * `field`, `params`, `method`, `verified`, `timing_ms`).
 *
 * # Safety
 * `code` must be a live handle; `secret_json` must be null or a valid
 * string; `out_report_json` must be valid.
 */
enum SrkStatus srk_recover(const struct SrkPublicCode *code,
                           enum SrkRoute route,
                           const char *secret_json,
                           char **out_report_json);

/**
 * Run a seeded structured-vs-random campaign. The request is a JSON object
 * with fields `p`, `s`, `m`, `comp`, `k`, `method` (one of `"square"`,
 * `"overbeck"`, `"intersection"`, `"recover"`, `"wrong_rep"`) and optional
 * `theta_l`, `gamma`, `trials` (default 100), `seed`, `multipliers`
 * (`"ones"`/`"random"`), `semilinear`, `j`, `budget`. The response carries
 * `summary` (rates and counts) and `csv` (the per-trial table, identical
 * bytes to the CLI's `trials.csv` for the same request and seed).
 *
 * # Safety
 * `config_json` must be a valid NUL-terminated string; `out_json` must be
 * valid.
 */
enum SrkStatus srk_experiment(const char *config_json, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUMRANK_H */
