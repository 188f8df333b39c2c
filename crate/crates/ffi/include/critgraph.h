#ifndef CRITGRAPH_H
#define CRITGRAPH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum CgStatus {
  CG_STATUS_OK = 0,
  CG_STATUS_NULL_POINTER = 1,
  CG_STATUS_INVALID_INPUT = 2,
  CG_STATUS_SIZE_CAP = 3,
  CG_STATUS_NON_CONVERGENCE = 4,
  CG_STATUS_IO = 5,
  CG_STATUS_BUFFER_TOO_SMALL = 6,
  CG_STATUS_PANIC = 7,
} CgStatus;

/**
 * Opaque multigraph.
 */
typedef struct CgGraph CgGraph;

/**
 * Opaque finite measured metric space.
 */
typedef struct CgSpace CgSpace;

/**
 * Susceptibilities of a graph: `s_k = Σ |C|^k / n`, `d = Σ D(C) / n`.
 */
typedef struct CgSusceptibility {
  double s1;
  double s2;
  double s3;
  double d;
  uint64_t largest;
  uint32_t diameter;
} CgSusceptibility;

/**
 * Bohman–Frieze limit constants.
 */
typedef struct CgBfConstants {
  double t_c;
  double alpha;
  double beta;
  double rho;
} CgBfConstants;

/**
 * Configuration-model degree parameters.
 */
typedef struct CgCmParams {
  double mu;
  double nu;
  double beta;
  double t_c;
} CgCmParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until
 * the next failing call on the same thread.
 */
const char *cg_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cg_version(void);

/**
 * Erdős–Rényi graph at time `t` (edge probability `1 - exp(-t/n)`).
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CgStatus cg_graph_er(size_t n, double t, uint64_t seed, struct CgGraph **out);

/**
 * G(x,q) with edge probabilities `1 - exp(-q x_i x_j)`.
 *
 * # Safety
 * `x` must point to `len` readable doubles; `out` must be valid for writes.
 */
enum CgStatus cg_graph_gxq(const double *x,
                           size_t len,
                           double q,
                           uint64_t seed,
                           struct CgGraph **out);

/**
 * Configuration model: uniform matching of the half-edges.
 *
 * # Safety
 * `degrees` must point to `len` readable values; `out` must be valid for writes.
 */
enum CgStatus cg_graph_cm(const uint32_t *degrees, size_t len, uint64_t seed, struct CgGraph **out);

/**
 * Releases a graph; null is ignored.
 *
 * # Safety
 * `g` must come from a `cg_graph_*` constructor and not be used afterwards.
 */
void cg_graph_free(struct CgGraph *g);

/**
 * Vertex count, or 0 for null.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t cg_graph_n(const struct CgGraph *g);

/**
 * Edge count, or 0 for null.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t cg_graph_edge_count(const struct CgGraph *g);

/**
 * Copies the edges into `u`, `v` (capacity `cap` each).
 * Returns `BufferTooSmall` when `cap` is less than the edge count.
 *
 * # Safety
 * `u` and `v` must be valid for `cap` writes.
 */
enum CgStatus cg_graph_edges(const struct CgGraph *g, uint64_t *u, uint64_t *v, size_t cap);

/**
 * Component sizes in decreasing order; `count` receives the number of
 * components. Returns `BufferTooSmall` (with `count` set) if `cap` is short.
 *
 * # Safety
 * `sizes` must be valid for `cap` writes and `count` for one write.
 */
enum CgStatus cg_graph_component_sizes(const struct CgGraph *g,
                                       uint64_t *sizes,
                                       size_t cap,
                                       size_t *count);

/**
 * Susceptibilities with exact all-pairs distances.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CgStatus cg_graph_susceptibility(const struct CgGraph *g, struct CgSusceptibility *out);

/**
 * Measured metric space from a row-major `n×n` distance matrix and `n`
 * masses.
 *
 * # Safety
 * `dist` must hold `n*n` doubles, `mass` `n` doubles; `out` must be valid for writes.
 */
enum CgStatus cg_space_new(size_t n, const double *dist, const double *mass, struct CgSpace **out);

/**
 * Releases a space; null is ignored.
 *
 * # Safety
 * `s` must come from [`cg_space_new`] and not be used afterwards.
 */
void cg_space_free(struct CgSpace *s);

/**
 * Point count, or 0 for null.
 *
 * # Safety
 * `s` must be null or a live handle.
 */
size_t cg_space_len(const struct CgSpace *s);

/**
 * Exact GHP distance (product of point counts at most 36).
 *
 * # Safety
 * Handles must be live; `out` must be valid for writes.
 */
enum CgStatus cg_ghp_exact(const struct CgSpace *a, const struct CgSpace *b, double *out);

/**
 * Lower and upper bounds on the GHP distance.
 *
 * # Safety
 * Handles must be live; `lower` and `upper` must be valid for writes.
 */
enum CgStatus cg_ghp_bounds(const struct CgSpace *a,
                            const struct CgSpace *b,
                            double *lower,
                            double *upper);

/**
 * Bohman–Frieze critical time and scaling constants.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CgStatus cg_bf_constants(struct CgBfConstants *out);

/**
 * Degree parameters and critical time from a pmf `p[k] = P(D = k)`.
 *
 * # Safety
 * `pmf` must hold `len` doubles; `out` must be valid for writes.
 */
enum CgStatus cg_cm_params(const double *pmf, size_t len, struct CgCmParams *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CRITGRAPH_H */
