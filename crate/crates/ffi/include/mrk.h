#ifndef MRK_H
#define MRK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MrkStatus {
  MRK_STATUS_OK = 0,
  MRK_STATUS_NULL_POINTER = 1,
  MRK_STATUS_INVALID_ARGUMENT = 2,
  MRK_STATUS_IO = 3,
  MRK_STATUS_PARSE = 4,
  MRK_STATUS_CONFIG = 5,
  MRK_STATUS_RESOURCE = 6,
  MRK_STATUS_EVALUATION = 7,
  MRK_STATUS_NOT_FOUND = 8,
  MRK_STATUS_PANIC = 9,
} MrkStatus;

typedef struct MrkGraph MrkGraph;

typedef struct MrkPatternSet MrkPatternSet;

typedef struct MrkRuleSet MrkRuleSet;

typedef struct MrkScoreTable MrkScoreTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call on the same thread.
 */
const char *mrk_last_error(void);

/**
 * Library version as a static string.
 */
const char *mrk_version(void);

/**
 * Loads a `src dst layer` edge file and an optional attribute file
 * (`attr_path` may be null).
 *
 * # Safety
 * Paths must be null or NUL-terminated strings; `out` must be writable.
 */
enum MrkStatus mrk_graph_load(const char *edge_path,
                              const char *attr_path,
                              bool directed,
                              struct MrkGraph **out);

/**
 * Number of nodes; 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t mrk_graph_node_count(const struct MrkGraph *g);

/**
 * Number of links (undirected edges counted once); 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t mrk_graph_edge_count(const struct MrkGraph *g);

/**
 * # Safety
 * `g` must be null or a handle not yet freed.
 */
void mrk_graph_free(struct MrkGraph *g);

/**
 * Mines patterns of up to `max_size` nodes with support at least `support`;
 * `support == 0` picks the node count of the smallest layer.
 *
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum MrkStatus mrk_mine(const struct MrkGraph *g,
                        size_t support,
                        size_t max_size,
                        struct MrkPatternSet **out);

/**
 * # Safety
 * `p` must be null or a live handle.
 */
size_t mrk_pattern_set_len(const struct MrkPatternSet *p);

/**
 * Writes the pattern set as JSON.
 *
 * # Safety
 * `p` must be a live handle and `path` a NUL-terminated string.
 */
enum MrkStatus mrk_pattern_set_write_json(const struct MrkPatternSet *p, const char *path);

/**
 * # Safety
 * `p` must be null or a handle not yet freed.
 */
void mrk_pattern_set_free(struct MrkPatternSet *p);

/**
 * Builds every association rule between patterns of `p`, measured on `g`,
 * the graph the patterns were mined from.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum MrkStatus mrk_rules_build(const struct MrkPatternSet *p,
                               const struct MrkGraph *g,
                               struct MrkRuleSet **out);

/**
 * # Safety
 * `r` must be null or a live handle.
 */
size_t mrk_rule_set_len(const struct MrkRuleSet *r);

/**
 * Writes the rule set as JSON.
 *
 * # Safety
 * `r` must be a live handle and `path` a NUL-terminated string.
 */
enum MrkStatus mrk_rule_set_write_json(const struct MrkRuleSet *r, const char *path);

/**
 * # Safety
 * `r` must be null or a handle not yet freed.
 */
void mrk_rule_set_free(struct MrkRuleSet *r);

/**
 * Scores candidate links of `g` with `rules`. `weighting` is one of `count`,
 * `conf`, `lift`, `conf-mean`, `lift-mean`.
 *
 * # Safety
 * Handles must be live, `weighting` NUL-terminated and `out` writable.
 */
enum MrkStatus mrk_predict(const struct MrkGraph *g,
                           const struct MrkRuleSet *rules,
                           const char *weighting,
                           struct MrkScoreTable **out);

/**
 * Number of scored candidate links.
 *
 * # Safety
 * `t` must be null or a live handle.
 */
size_t mrk_score_table_len(const struct MrkScoreTable *t);

/**
 * Score of link `src -> dst` in `layer`; 0 when the link was not scored.
 * Unknown names give `MRK_STATUS_NOT_FOUND`.
 *
 * # Safety
 * `t` must be a live handle, names NUL-terminated and `score` writable.
 */
enum MrkStatus mrk_score_table_get(const struct MrkScoreTable *t,
                                   const char *src,
                                   const char *dst,
                                   const char *layer,
                                   double *score);

/**
 * Writes the table as `src,dst,layer,score` CSV.
 *
 * # Safety
 * `t` must be a live handle and `path` a NUL-terminated string.
 */
enum MrkStatus mrk_score_table_write_csv(const struct MrkScoreTable *t, const char *path);

/**
 * # Safety
 * `t` must be null or a handle not yet freed.
 */
void mrk_score_table_free(struct MrkScoreTable *t);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MRK_H */
