#ifndef GECGEN_H
#define GECGEN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GecStatus {
  GEC_STATUS_OK = 0,
  GEC_STATUS_NULL_POINTER = 1,
  GEC_STATUS_INVALID_UTF8 = 2,
  GEC_STATUS_INVALID_ARGUMENT = 3,
  GEC_STATUS_IO = 4,
  GEC_STATUS_DATA = 5,
  GEC_STATUS_PROVIDER = 6,
  GEC_STATUS_INTERNAL = 7,
} GecStatus;

/**
 * Rewrite-table scorer with a bigram language model, usable for
 * iterative decoding without a trained network.
 */
typedef struct GecReferenceScorer GecReferenceScorer;

/**
 * A trained or loaded BPE wordpiece model.
 */
typedef struct GecSubwordModel GecSubwordModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *gec_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void gec_string_free(char *s);

/**
 * F-beta from precision and recall in [0, 1].
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum GecStatus gec_f_beta(double precision, double recall, double beta, double *out);

/**
 * Revision pairs kept for a page with `n` revisions.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum GecStatus gec_sampled_pair_count(uint64_t n, double base, uint64_t *out);

/**
 * Plain text of a wikitext revision, one line per paragraph.
 *
 * # Safety
 * `wikitext` must be a NUL-terminated string; `out` valid for a write.
 * The result must be freed with [`gec_string_free`].
 */
enum GecStatus gec_extract_text(const char *wikitext, char **out);

/**
 * Spelling noise with the default operation mix at `rate` per character.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` valid for a write.
 * The result must be freed with [`gec_string_free`].
 */
enum GecStatus gec_corrupt_spelling(const char *text, double rate, uint64_t seed, char **out);

/**
 * Sentence GLEU over whitespace tokens against `n_refs` references.
 *
 * # Safety
 * All strings must be NUL-terminated; `refs` must point to `n_refs`
 * strings; `out` must be valid for a write.
 */
enum GecStatus gec_gleu(const char *source,
                        const char *hypothesis,
                        const char *const *refs,
                        size_t n_refs,
                        double *out);

/**
 * Loads a model written by `gecgen train-subword`.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` valid for a write. The
 * handle must be released with [`gec_subword_model_free`].
 */
enum GecStatus gec_subword_model_load(const char *path, struct GecSubwordModel **out);

/**
 * Trains a model on `n_lines` lines of text.
 *
 * # Safety
 * `lines` must point to `n_lines` NUL-terminated strings; `out` valid for
 * a write. The handle must be released with [`gec_subword_model_free`].
 */
enum GecStatus gec_subword_model_train(const char *const *lines,
                                       size_t n_lines,
                                       size_t vocab_size,
                                       struct GecSubwordModel **out);

/**
 * Number of wordpieces in `text`.
 *
 * # Safety
 * `model` must be a live handle; `text` NUL-terminated; `out` valid for a
 * write.
 */
enum GecStatus gec_subword_model_count(const struct GecSubwordModel *model,
                                       const char *text,
                                       size_t *out);

/**
 * Space-separated wordpieces of `text`.
 *
 * # Safety
 * `model` must be a live handle; `text` NUL-terminated; `out` valid for a
 * write. The result must be freed with [`gec_string_free`].
 */
enum GecStatus gec_subword_model_encode(const struct GecSubwordModel *model,
                                        const char *text,
                                        char **out);

/**
 * # Safety
 * `model` must be null or a handle not yet freed.
 */
void gec_subword_model_free(struct GecSubwordModel *model);

/**
 * Builds a scorer from `n_rules` rewrites `from[i] -> to[i]` and a bigram
 * model trained on `n_lm` sentences.
 *
 * # Safety
 * `from` and `to` must each point to `n_rules` strings, `lm_sentences` to
 * `n_lm` strings; `out` valid for a write. The handle must be released
 * with [`gec_reference_scorer_free`].
 */
enum GecStatus gec_reference_scorer_new(const char *const *from,
                                        const char *const *to,
                                        size_t n_rules,
                                        const char *const *lm_sentences,
                                        size_t n_lm,
                                        double channel_penalty,
                                        struct GecReferenceScorer **out);

/**
 * Iterative decoding of `input`. `iterations` may be null.
 *
 * # Safety
 * `scorer` must be a live handle; `input` NUL-terminated; `out` valid for
 * a write. The result must be freed with [`gec_string_free`].
 */
enum GecStatus gec_reference_scorer_decode(const struct GecReferenceScorer *scorer,
                                           const char *input,
                                           size_t beam,
                                           double threshold,
                                           size_t max_iter,
                                           char **out,
                                           size_t *iterations);

/**
 * # Safety
 * `scorer` must be null or a handle not yet freed.
 */
void gec_reference_scorer_free(struct GecReferenceScorer *scorer);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GECGEN_H */
