/* SPDX-License-Identifier: Apache-2.0 */

#ifndef GCNFDR_H
#define GCNFDR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Netlist format selector for `gcnfdr_netlist_parse`.
 */
typedef enum GcnfdrFormat {
  GCNFDR_FORMAT_VERILOG = 0,
  GCNFDR_FORMAT_JSON = 1,
} GcnfdrFormat;

/**
 * Result code of every fallible call.
 */
typedef enum GcnfdrStatus {
  GCNFDR_STATUS_OK = 0,
  GCNFDR_STATUS_NULL_POINTER = 1,
  GCNFDR_STATUS_INVALID_UTF8 = 2,
  /**
   * Bad configuration or arguments.
   */
  GCNFDR_STATUS_CONFIG = 3,
  /**
   * Malformed or inconsistent input data.
   */
  GCNFDR_STATUS_INPUT = 4,
  /**
   * A size guard refused the request.
   */
  GCNFDR_STATUS_GUARD = 5,
  GCNFDR_STATUS_INDEX_OUT_OF_RANGE = 6,
  GCNFDR_STATUS_IO = 7,
  GCNFDR_STATUS_PANIC = 8,
} GcnfdrStatus;

typedef struct GcnfdrGraph GcnfdrGraph;

typedef struct GcnfdrNetlist GcnfdrNetlist;

typedef struct GcnfdrTable GcnfdrTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call on the same thread.
 */
const char *gcnfdr_last_error(void);

/**
 * # Safety
 * `s` is NULL or a string returned by this library and not yet freed.
 */
void gcnfdr_string_free(char *s);

/**
 * Parses netlist source text.
 *
 * # Safety
 * `source` is a NUL-terminated string; `out` is writable.
 */
enum GcnfdrStatus gcnfdr_netlist_parse(const char *source,
                                       enum GcnfdrFormat format,
                                       struct GcnfdrNetlist **out);

/**
 * # Safety
 * `n` is NULL or a handle from `gcnfdr_netlist_parse` not yet freed.
 */
void gcnfdr_netlist_free(struct GcnfdrNetlist *n);

/**
 * # Safety
 * `n` is a live netlist handle; `out` is writable.
 */
enum GcnfdrStatus gcnfdr_netlist_flipflop_count(const struct GcnfdrNetlist *n, uintptr_t *out);

/**
 * # Safety
 * `n` is a live netlist handle; `out` is writable.
 */
enum GcnfdrStatus gcnfdr_graph_build(const struct GcnfdrNetlist *n, struct GcnfdrGraph **out);

/**
 * # Safety
 * `gml` is a NUL-terminated string; `out` is writable.
 */
enum GcnfdrStatus gcnfdr_graph_from_gml(const char *gml, struct GcnfdrGraph **out);

/**
 * Writes a newly allocated GML document to `out`.
 *
 * # Safety
 * `g` is a live graph handle; `out` is writable.
 */
enum GcnfdrStatus gcnfdr_graph_to_gml(const struct GcnfdrGraph *g, char **out);

/**
 * # Safety
 * `g` is a live graph handle; `out` is writable.
 */
enum GcnfdrStatus gcnfdr_graph_node_count(const struct GcnfdrGraph *g, uintptr_t *out);

/**
 * # Safety
 * `g` is a live graph handle; `out` is writable.
 */
enum GcnfdrStatus gcnfdr_graph_edge_count(const struct GcnfdrGraph *g, uintptr_t *out);

/**
 * # Safety
 * `g` is NULL or a graph handle not yet freed.
 */
void gcnfdr_graph_free(struct GcnfdrGraph *g);

/**
 * Sampled SEU campaign over a random workload of `n_cycles` cycles.
 *
 * # Safety
 * `n` is a live netlist handle; `out` is writable.
 */
enum GcnfdrStatus gcnfdr_campaign_run(const struct GcnfdrNetlist *n,
                                      uintptr_t n_cycles,
                                      uint64_t workload_seed,
                                      uintptr_t injections_per_ff,
                                      uint64_t seed,
                                      struct GcnfdrTable **out);

/**
 * Every `(flip-flop, cycle)` injection over a random workload.
 *
 * # Safety
 * `n` is a live netlist handle; `out` is writable.
 */
enum GcnfdrStatus gcnfdr_campaign_exhaustive(const struct GcnfdrNetlist *n,
                                             uintptr_t n_cycles,
                                             uint64_t workload_seed,
                                             struct GcnfdrTable **out);

/**
 * # Safety
 * `t` is a live table handle; `out` is writable.
 */
enum GcnfdrStatus gcnfdr_table_len(const struct GcnfdrTable *t, uintptr_t *out);

/**
 * # Safety
 * `t` is a live table handle; `out` is writable.
 */
enum GcnfdrStatus gcnfdr_table_fdr(const struct GcnfdrTable *t, uintptr_t index, double *out);

/**
 * Writes a newly allocated flip-flop name to `out`.
 *
 * # Safety
 * `t` is a live table handle; `out` is writable.
 */
enum GcnfdrStatus gcnfdr_table_name(const struct GcnfdrTable *t, uintptr_t index, char **out);

/**
 * Writes the labels CSV (`flipflop,injections,failures,fdr`) to `out`.
 *
 * # Safety
 * `t` is a live table handle; `out` is writable.
 */
enum GcnfdrStatus gcnfdr_table_to_csv(const struct GcnfdrTable *t, char **out);

/**
 * # Safety
 * `t` is NULL or a table handle not yet freed.
 */
void gcnfdr_table_free(struct GcnfdrTable *t);

/**
 * Runs every pipeline stage for the JSON config at `config_path`.
 *
 * # Safety
 * `config_path` is a NUL-terminated string.
 */
enum GcnfdrStatus gcnfdr_pipeline_run(const char *config_path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GCNFDR_H */
