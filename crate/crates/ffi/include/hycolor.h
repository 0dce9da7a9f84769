#ifndef HYCOLOR_H
#define HYCOLOR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HcStatus {
  HC_STATUS_OK = 0,
  HC_STATUS_NULL_POINTER = 1,
  HC_STATUS_INVALID_ARGUMENT = 2,
  HC_STATUS_PARSE = 3,
  HC_STATUS_IO = 4,
  HC_STATUS_MODEL_FORMAT = 5,
  HC_STATUS_TOO_LARGE = 6,
  HC_STATUS_TIMEOUT = 7,
  HC_STATUS_INTERNAL = 8,
} HcStatus;

// Opaque graph handle.
typedef struct HcGraph HcGraph;

// Opaque model handle.
typedef struct HcModel HcModel;

typedef struct HcCorrectionStats {
  size_t initial_invalid_edges;
  size_t recolored_by_reuse;
  size_t fresh_colors_added;
  size_t final_colors_used;
} HcCorrectionStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the calling thread's most recent failure, or null. The pointer
// stays valid until the next call into this library on the same thread.
const char *hc_last_error(void);

// Creates an edgeless graph with `n >= 1` nodes.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum HcStatus hc_graph_new(size_t n, struct HcGraph **out);

// Adds the undirected edge `u`-`v` (0-based).
//
// # Safety
// `g` must be a live handle from this library.
enum HcStatus hc_graph_add_edge(struct HcGraph *g, size_t u, size_t v);

// Parses a NUL-terminated DIMACS `.col` text.
//
// # Safety
// `text` must be a valid C string and `out` valid storage for one handle.
enum HcStatus hc_graph_from_dimacs(const char *text, struct HcGraph **out);

// # Safety
// `g` must be a live handle or null.
size_t hc_graph_node_count(const struct HcGraph *g);

// # Safety
// `g` must be a live handle or null.
size_t hc_graph_edge_count(const struct HcGraph *g);

// # Safety
// `g` must be a handle from this library or null; it must not be used afterwards.
void hc_graph_free(struct HcGraph *g);

// Exact chromatic number within `timeout_ms`. On timeout returns `Timeout` with the
// best coloring found and its color count still written.
//
// # Safety
// `g` must be a live handle, `chi` valid, and `coloring_out` writable for `n` values.
enum HcStatus hc_exact_chromatic(const struct HcGraph *g,
                                 uint64_t timeout_ms,
                                 size_t *chi,
                                 uint32_t *coloring_out);

// DSATUR coloring.
//
// # Safety
// `g` must be a live handle and `coloring_out` writable for `n` values.
enum HcStatus hc_dsatur(const struct HcGraph *g, uint32_t *coloring_out);

// Repairs `colors` in place so that no edge is monochromatic.
//
// # Safety
// `g` must be a live handle, `colors` readable and writable for `n` values, and
// `stats` valid or null.
enum HcStatus hc_color_correct(const struct HcGraph *g,
                               uint32_t *colors,
                               struct HcCorrectionStats *stats);

// Loads a parameter file.
//
// # Safety
// `path` must be a valid C string and `out` valid storage for one handle.
enum HcStatus hc_model_load(const char *path, struct HcModel **out);

// # Safety
// `m` must be a handle from this library or null; it must not be used afterwards.
void hc_model_free(struct HcModel *m);

// Raw model prediction (not necessarily proper).
//
// # Safety
// `m` and `g` must be live handles and `coloring_out` writable for `n` values.
enum HcStatus hc_model_predict(const struct HcModel *m,
                               const struct HcGraph *g,
                               uint32_t *coloring_out);

// Model prediction followed by color correction; the result is always proper.
// `bfs != 0` feeds nodes to the model in breadth-first order.
//
// # Safety
// `m` and `g` must be live handles, `coloring_out` writable for `n` values, and
// `stats` valid or null.
enum HcStatus hc_hybrid_color(const struct HcModel *m,
                              const struct HcGraph *g,
                              int32_t bfs,
                              uint32_t *coloring_out,
                              struct HcCorrectionStats *stats);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYCOLOR_H */
