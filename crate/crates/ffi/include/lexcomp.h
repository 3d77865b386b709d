#ifndef LEXCOMP_H
#define LEXCOMP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LcStatus {
  LC_STATUS_OK = 0,
  LC_STATUS_NULL_POINTER = 1,
  LC_STATUS_INVALID_UTF8 = 2,
  LC_STATUS_INVALID_ARGUMENT = 3,
  LC_STATUS_IO = 4,
  LC_STATUS_PARSE = 5,
  LC_STATUS_NOT_FOUND = 6,
  LC_STATUS_BUFFER_TOO_SMALL = 7,
  LC_STATUS_INTERNAL = 8,
} LcStatus;

/**
 * Opaque trained model directory plus the embedding stores it needs.
 */
typedef struct LcPredictor LcPredictor;

/**
 * Opaque GloVe store.
 */
typedef struct LcWordVecs LcWordVecs;

typedef struct LcMetrics {
  double mae;
  double mse;
  double pearson;
  uintptr_t n;
} LcMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread. Valid until the next
 * failing call on the same thread; never null.
 */
const char *lc_last_error(void);

/**
 * Loads a GloVe text file with vectors of `dim` components.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LcStatus lc_glove_load(const char *path, uintptr_t dim, struct LcWordVecs **out);

/**
 * # Safety
 * `store` must come from [`lc_glove_load`] and not be used afterwards.
 */
void lc_glove_free(struct LcWordVecs *store);

/**
 * # Safety
 * `store` must be a live handle or null.
 */
uintptr_t lc_glove_dim(const struct LcWordVecs *store);

/**
 * Writes the vector of a one- or two-word target into `out[0..out_len]`.
 * `out_len` must equal the store dimension.
 *
 * # Safety
 * `store` must be live, `target` NUL-terminated and `out` valid for
 * `out_len` writes.
 */
enum LcStatus lc_glove_lookup(const struct LcWordVecs *store,
                              const char *target,
                              double *out,
                              uintptr_t out_len);

/**
 * Opens a trained model directory. `glove_path` and `contextual_path` may be
 * null when no loaded pipeline uses them.
 *
 * # Safety
 * String arguments must be NUL-terminated or null; `out` must be valid.
 */
enum LcStatus lc_predictor_open(const char *model_dir,
                                const char *glove_path,
                                uintptr_t glove_dim,
                                const char *contextual_path,
                                struct LcPredictor **out);

/**
 * # Safety
 * `predictor` must come from [`lc_predictor_open`] and not be used afterwards.
 */
void lc_predictor_free(struct LcPredictor *predictor);

/**
 * Predicts the complexity of `target` in `sentence`. `id` selects the
 * contextual record when a contextual pipeline is loaded.
 *
 * # Safety
 * `predictor` must be live, strings NUL-terminated and `out` valid.
 */
enum LcStatus lc_predictor_predict(const struct LcPredictor *predictor,
                                   const char *id,
                                   const char *sentence,
                                   const char *target,
                                   double *out);

/**
 * Writes the sorted dummy annotation set for score `c` into
 * `out_labels[0..n]`.
 *
 * # Safety
 * `out_labels` must be valid for `n` writes.
 */
enum LcStatus lc_generate_annotations(double c,
                                      uintptr_t n,
                                      double rho,
                                      uint64_t seed,
                                      double *out_labels);

/**
 * Mean of grid labels (each one of 0, 0.25, 0.5, 0.75, 1).
 *
 * # Safety
 * `labels` must be valid for `len` reads and `out` valid.
 */
enum LcStatus lc_aggregate(const double *labels, uintptr_t len, double *out);

/**
 * MAE, MSE and Pearson correlation of two series of length `len`.
 *
 * # Safety
 * `pred` and `gold` must be valid for `len` reads and `out` valid.
 */
enum LcStatus lc_metrics(const double *pred,
                         const double *gold,
                         uintptr_t len,
                         struct LcMetrics *out);

/**
 * Wraps the first occurrence of `target` in `sentence` with single quotes.
 * The result must be released with [`lc_string_free`].
 *
 * # Safety
 * Strings must be NUL-terminated and `out` valid.
 */
enum LcStatus lc_weak_signal(const char *sentence, const char *target, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void lc_string_free(char *s);

/**
 * Index of the first occurrence of the `needle` token sequence in `haystack`,
 * or -1 in `out_start` when absent.
 *
 * # Safety
 * `haystack` and `needle` must point to arrays of NUL-terminated strings of
 * the given lengths; `out_start` must be valid.
 */
enum LcStatus lc_kmp_find(const char *const *haystack,
                          uintptr_t haystack_len,
                          const char *const *needle,
                          uintptr_t needle_len,
                          intptr_t *out_start);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEXCOMP_H */
