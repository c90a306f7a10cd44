#ifndef RSK_H
#define RSK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum RskStatus {
  RSK_STATUS_OK = 0,
  /**
   * Nothing found within the search bound, or a verification suite failed.
   */
  RSK_STATUS_NOT_FOUND = 1,
  RSK_STATUS_NULL_ARGUMENT = 2,
  RSK_STATUS_INVALID_ARGUMENT = 3,
  RSK_STATUS_SCHEMA = 4,
  RSK_STATUS_SPEC_MISMATCH = 5,
  RSK_STATUS_RESOURCE_LIMIT = 6,
  RSK_STATUS_MALFORMED_WITNESS = 7,
  RSK_STATUS_INTERNAL = 8,
  RSK_STATUS_PANIC = 9,
} RskStatus;

/**
 * A reduction bundle.
 */
typedef struct RskBundle RskBundle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *rsk_last_error(void);

/**
 * Builds a bundle. `variant` is one of `pair`, `pair2rat`, `mon2rat`,
 * `tighter`; `input_json` is an automaton, or `{group, a, b}` for `pair`.
 * `signed_perm` is the dimension of the finite group used by `tighter`.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be writable.
 */
enum RskStatus rsk_bundle_build(const char *input_json,
                                const char *variant,
                                bool pad_pow2,
                                uint32_t signed_perm,
                                struct RskBundle **out);

/**
 * Reads a bundle from its JSON form.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` must be writable.
 */
enum RskStatus rsk_bundle_from_json(const char *json, struct RskBundle **out);

/**
 * Writes the JSON form of a bundle to `*out`.
 *
 * # Safety
 * `bundle` must come from this library; `out` must be writable.
 */
enum RskStatus rsk_bundle_to_json(const struct RskBundle *bundle, char **out);

/**
 * Number of generators, or 0 for a null handle.
 *
 * # Safety
 * `bundle` must be null or come from this library.
 */
size_t rsk_bundle_generator_count(const struct RskBundle *bundle);

/**
 * Bounded membership of the pair (g, target) where `g_json` is an element
 * of the base group. Returns `Ok` when found and `NotFound` otherwise; in
 * both cases `*out` receives a JSON report with the verdict, and with the
 * witness and decoded path when found. `max_elements = 0` keeps the default
 * cap.
 *
 * # Safety
 * `bundle` must come from this library; `g_json` must be NUL-terminated;
 * `out` must be writable.
 */
enum RskStatus rsk_bundle_member(const struct RskBundle *bundle,
                                 const char *g_json,
                                 size_t max_len,
                                 size_t max_elements,
                                 char **out);

/**
 * Section elements with witnesses of length at most `max_len`, as a JSON
 * array of `{element, length, witness}`.
 *
 * # Safety
 * `bundle` must come from this library; `out` must be writable.
 */
enum RskStatus rsk_bundle_section(const struct RskBundle *bundle,
                                  size_t max_len,
                                  size_t max_elements,
                                  char **out);

/**
 * Runs a verification suite by name. Returns `Ok` when it passes and
 * `NotFound` when it reports failures; `*out` receives the report.
 *
 * # Safety
 * `suite` must be NUL-terminated; `out` must be writable.
 */
enum RskStatus rsk_verify(const char *suite, uint64_t seed, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void rsk_string_free(char *s);

/**
 * # Safety
 * `bundle` must be null or a handle returned by this library, freed once.
 */
void rsk_bundle_free(struct RskBundle *bundle);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RSK_H */
