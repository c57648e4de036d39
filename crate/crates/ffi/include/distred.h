#ifndef DISTRED_H
#define DISTRED_H

#include <stdbool.h>
#include <stddef.h>

typedef enum DrOutcome {
  DR_OUTCOME_VALID_REDUCTION = 0,
  DR_OUTCOME_NOT_REDUCTION = 1,
  DR_OUTCOME_UNKNOWN = 2,
} DrOutcome;

typedef enum DrStatus {
  DR_STATUS_OK = 0,
  DR_STATUS_NULL_POINTER = 1,
  DR_STATUS_INVALID_UTF8 = 2,
  DR_STATUS_PARSE = 3,
  DR_STATUS_INVALID_INPUT = 4,
  DR_STATUS_CAPACITY = 5,
  DR_STATUS_PANIC = 6,
} DrStatus;

/**
 * A list of distributions over the alphabet of some source.
 */
typedef struct DrCandidate DrCandidate;

/**
 * A distribution of a named alphabet.
 */
typedef struct DrDistribution DrDistribution;

/**
 * The verdict of a verification or existence check.
 */
typedef struct DrVerdict DrVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until
 * the next call into the library on this thread.
 */
const char *dr_last_error(void);

/**
 * Library version, a static string.
 */
const char *dr_version(void);

/**
 * Parses distribution-file text holding exactly one distribution.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum DrStatus dr_distribution_parse(const char *text, struct DrDistribution **out);

/**
 * Number of parts.
 *
 * # Safety
 * `d` must be null or a live handle.
 */
size_t dr_distribution_size(const struct DrDistribution *d);

/**
 * Canonical `(ab|bc)` rendering; free with [`dr_string_free`].
 *
 * # Safety
 * `d` must be null or a live handle.
 */
char *dr_distribution_render(const struct DrDistribution *d);

/**
 * # Safety
 * `d` must be null or a handle not yet freed.
 */
void dr_distribution_free(struct DrDistribution *d);

/**
 * Parses distribution-file text listing candidate members. Its alphabet
 * must name the same symbols, in the same order, as `source`'s.
 *
 * # Safety
 * Pointers must be valid; `out` receives a new handle on success.
 */
enum DrStatus dr_candidate_parse(const struct DrDistribution *source,
                                 const char *text,
                                 struct DrCandidate **out);

/**
 * Number of members.
 *
 * # Safety
 * `c` must be null or a live handle.
 */
size_t dr_candidate_len(const struct DrCandidate *c);

/**
 * # Safety
 * `c` must be null or a handle not yet freed.
 */
void dr_candidate_free(struct DrCandidate *c);

/**
 * Decides whether `candidate` is a reduction of `source`.
 *
 * # Safety
 * Pointers must be valid; `out` receives a new handle on success.
 */
enum DrStatus dr_verify(const struct DrDistribution *source,
                        const struct DrCandidate *candidate,
                        bool parallel,
                        struct DrVerdict **out);

/**
 * Decides whether `source` has any reduction.
 *
 * # Safety
 * Pointers must be valid; `out` receives a new handle on success.
 */
enum DrStatus dr_exists(const struct DrDistribution *source, bool parallel, struct DrVerdict **out);

/**
 * Outcome of a verdict; `Unknown` for a null handle.
 *
 * # Safety
 * `v` must be null or a live handle.
 */
enum DrOutcome dr_verdict_outcome(const struct DrVerdict *v);

/**
 * Mechanism label such as `substitution`, or null when there is none.
 * The string is static.
 *
 * # Safety
 * `v` must be null or a live handle.
 */
const char *dr_verdict_mechanism(const struct DrVerdict *v);

/**
 * The verdict as a JSON result document; free with [`dr_string_free`].
 *
 * # Safety
 * `v` must be null or a live handle.
 */
char *dr_verdict_to_json(const struct DrVerdict *v);

/**
 * # Safety
 * `v` must be null or a handle not yet freed.
 */
void dr_verdict_free(struct DrVerdict *v);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void dr_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DISTRED_H */
