#ifndef BBT_H
#define BBT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BbtStatus {
  BBT_STATUS_OK = 0,
  BBT_STATUS_NULL_POINTER = 1,
  BBT_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed domain or tree text, or a name the domain does not define.
   */
  BBT_STATUS_PARSE = 3,
  /**
   * The planner could not reach the target.
   */
  BBT_STATUS_PLANNING = 4,
  /**
   * Tick or belief-size limit exceeded.
   */
  BBT_STATUS_LIMITS = 5,
  BBT_STATUS_IO = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  BBT_STATUS_PANIC = 7,
} BbtStatus;

/**
 * Grounded domain handle.
 */
typedef struct BbtDomain BbtDomain;

/**
 * Tree handle. Only meaningful together with the domain it was built against.
 */
typedef struct BbtTree BbtTree;

/**
 * Bounds on exhaustive simulation.
 */
typedef struct BbtLimits {
  uintptr_t max_root_ticks;
  uintptr_t max_entries;
  double prune_epsilon;
} BbtLimits;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *bbt_last_error(void);

/**
 * Default simulation limits (10000 root ticks, 100000 entries, no pruning).
 */
struct BbtLimits bbt_limits_default(void);

/**
 * Parses and grounds a domain definition.
 *
 * # Safety
 * `source` must be a NUL-terminated string; `out` must be writable.
 */
enum BbtStatus bbt_domain_parse(const char *source, struct BbtDomain **out);

/**
 * # Safety
 * `domain` must come from [`bbt_domain_parse`] and not be used afterwards. NULL is ignored.
 */
void bbt_domain_free(struct BbtDomain *domain);

/**
 * Number of grounded literals, actions and templates.
 *
 * # Safety
 * `domain` must be a live handle; the output pointers must be writable.
 */
enum BbtStatus bbt_domain_counts(const struct BbtDomain *domain,
                                 uintptr_t *literals,
                                 uintptr_t *actions,
                                 uintptr_t *templates);

/**
 * Synthesizes a tree for the domain's goal. A `target` outside (0, 1]
 * keeps the domain's own goal probability. `log` (optional) receives the
 * tab-separated iteration log.
 *
 * # Safety
 * `domain` must be a live handle; `tree` and `probability` must be writable;
 * `log` may be NULL.
 */
enum BbtStatus bbt_plan(const struct BbtDomain *domain,
                        double target,
                        struct BbtLimits limits,
                        struct BbtTree **tree,
                        double *probability,
                        char **log);

/**
 * Loads a JSON tree file against `domain`.
 *
 * # Safety
 * `domain` must be live, `json` NUL-terminated, `out` writable.
 */
enum BbtStatus bbt_tree_from_json(const struct BbtDomain *domain,
                                  const char *json,
                                  struct BbtTree **out);

/**
 * # Safety
 * `domain` and `tree` must be live; `out` writable. Free the result with [`bbt_string_free`].
 */
enum BbtStatus bbt_tree_to_json(const struct BbtDomain *domain,
                                const struct BbtTree *tree,
                                char **out);

/**
 * # Safety
 * `domain` and `tree` must be live; `out` writable. Free the result with [`bbt_string_free`].
 */
enum BbtStatus bbt_tree_to_dot(const struct BbtDomain *domain,
                               const struct BbtTree *tree,
                               char **out);

/**
 * # Safety
 * `tree` must come from this library and not be used afterwards. NULL is ignored.
 */
void bbt_tree_free(struct BbtTree *tree);

/**
 * Exhaustive simulation from the domain's initial state; writes the success
 * probability and, if `dump` is non-NULL, the terminal distribution.
 *
 * # Safety
 * `domain` and `tree` must be live; `probability` writable; `dump` may be NULL.
 */
enum BbtStatus bbt_simulate(const struct BbtDomain *domain,
                            const struct BbtTree *tree,
                            struct BbtLimits limits,
                            double *probability,
                            char **dump);

/**
 * Monte Carlo execution: `runs` independent classic runs seeded from
 * `(seed, run index)`. Writes the number of successful runs.
 *
 * # Safety
 * `domain` and `tree` must be live; `successes` writable.
 */
enum BbtStatus bbt_exec(const struct BbtDomain *domain,
                        const struct BbtTree *tree,
                        uint64_t seed,
                        uint64_t runs,
                        uintptr_t max_ticks,
                        uint64_t *successes);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void bbt_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BBT_H */
