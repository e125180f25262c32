#ifndef SHAREDP_H
#define SHAREDP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Engine selector for [`sdp_run`].
 */
typedef enum SdpEngine {
  SDP_ENGINE_SHAREDP = 0,
  SDP_ENGINE_MAXFLOW = 1,
  SDP_ENGINE_ORACLE = 2,
} SdpEngine;

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum SdpStatus {
  SDP_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  SDP_STATUS_NULL_ARGUMENT = 1,
  /**
   * An argument was out of range or malformed.
   */
  SDP_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The graph file could not be read or parsed.
   */
  SDP_STATUS_LOAD_FAILED = 3,
  /**
   * The engine reported an internal inconsistency.
   */
  SDP_STATUS_ENGINE_FAILED = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  SDP_STATUS_PANIC = 5,
} SdpStatus;

/**
 * Opaque immutable graph.
 */
typedef struct SdpGraph SdpGraph;

/**
 * Opaque per-query results of one run.
 */
typedef struct SdpResults SdpResults;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failed call on this thread, or "" after a
 * successful one. Valid until the next call on the same thread.
 */
const char *sdp_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sdp_version(void);

/**
 * Loads a `"u v"` edge list. When `undirected` is true each edge is added
 * in both directions.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum SdpStatus sdp_graph_load(const char *path, bool undirected, struct SdpGraph **out);

/**
 * Builds a graph on `n` vertices from `m` edges `src[i] -> dst[i]`.
 * Self-loops and duplicates are dropped.
 *
 * # Safety
 * `src` and `dst` must hold `m` elements each; `out` must be writable.
 */
enum SdpStatus sdp_graph_from_edges(size_t n,
                                    const uint32_t *src,
                                    const uint32_t *dst,
                                    size_t m,
                                    struct SdpGraph **out);

/**
 * Vertex count, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t sdp_graph_vertex_count(const struct SdpGraph *g);

/**
 * Edge count after deduplication, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t sdp_graph_edge_count(const struct SdpGraph *g);

/**
 * Releases a graph. Null is ignored.
 *
 * # Safety
 * `g` must be null or a handle not yet freed.
 */
void sdp_graph_free(struct SdpGraph *g);

/**
 * Answers `count` queries `sources[i] -> targets[i]` for `k` disjoint
 * paths each. `timeout_secs` is the per-query limit; the shared engine
 * gets `timeout_secs * count` for the whole batch.
 *
 * # Safety
 * `g` must be a live handle; `sources` and `targets` must hold `count`
 * elements each; `out` must be writable.
 */
enum SdpStatus sdp_run(const struct SdpGraph *g,
                       enum SdpEngine engine,
                       uint32_t k,
                       const uint32_t *sources,
                       const uint32_t *targets,
                       size_t count,
                       double timeout_secs,
                       struct SdpResults **out);

/**
 * Number of queries in a result set, or 0 for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
size_t sdp_results_len(const struct SdpResults *r);

/**
 * Number of disjoint paths found for `query`.
 *
 * # Safety
 * `r` must be a live handle; `found` must be writable.
 */
enum SdpStatus sdp_results_found(const struct SdpResults *r, size_t query, size_t *found);

/**
 * Whether `query` ran out of time.
 *
 * # Safety
 * `r` must be a live handle; `timed_out` must be writable.
 */
enum SdpStatus sdp_results_timed_out(const struct SdpResults *r, size_t query, bool *timed_out);

/**
 * Whether every path set in the run passed the disjointness check.
 *
 * # Safety
 * `r` must be a live handle; `verified` must be writable.
 */
enum SdpStatus sdp_results_verified(const struct SdpResults *r, bool *verified);

/**
 * Vertex count of path `path` of `query`, endpoints included.
 *
 * # Safety
 * `r` must be a live handle; `len` must be writable.
 */
enum SdpStatus sdp_results_path_len(const struct SdpResults *r,
                                    size_t query,
                                    size_t path,
                                    size_t *len);

/**
 * Copies path `path` of `query` into `buf`, which holds `cap` vertices.
 * Fails without writing when `cap` is too small.
 *
 * # Safety
 * `r` must be a live handle; `buf` must hold `cap` elements.
 */
enum SdpStatus sdp_results_path_copy(const struct SdpResults *r,
                                     size_t query,
                                     size_t path,
                                     uint32_t *buf,
                                     size_t cap);

/**
 * Shared expansions over all expansions for a shared-engine run; negative
 * when the engine does not share work.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
double sdp_results_share_ratio(const struct SdpResults *r);

/**
 * Releases a result set. Null is ignored.
 *
 * # Safety
 * `r` must be null or a handle not yet freed.
 */
void sdp_results_free(struct SdpResults *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SHAREDP_H */
