#ifndef PROTOEF_H
#define PROTOEF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PefStatus {
  PEF_OK = 0,
  // A required pointer argument was null.
  PEF_ERR_NULL = 1,
  // Malformed text input (JSON, LP text, UTF-8).
  PEF_ERR_PARSE = 2,
  // Well-formed but invalid input.
  PEF_ERR_INVALID = 3,
  // The graph contains the forbidden induced pattern.
  PEF_ERR_FORBIDDEN = 4,
  // A Rust panic was caught at the boundary.
  PEF_ERR_PANIC = 5,
} PefStatus;

typedef struct PefFormulation PefFormulation;

typedef struct PefGraph PefGraph;

typedef struct PefSize {
  uintptr_t num_inequalities;
  uintptr_t num_equations;
  uintptr_t num_variables;
  uintptr_t num_aux;
  uintptr_t total_encoding;
} PefSize;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next call into the library on this thread.
const char *pef_last_error(void);

// Library version as a static string.
const char *pef_version(void);

// # Safety
// `s` must be null or a string returned by this library.
void pef_string_free(char *s);

// Parses a graph from JSON (`{"n":…, "edges":[[i,j],…]}`) or a DIMACS
// edge list.
//
// # Safety
// `text` must be a nul-terminated string and `out` a valid pointer.
enum PefStatus pef_graph_load(const char *text, struct PefGraph **out);

// # Safety
// `edges` must point to `2 * num_edges` vertex indices.
enum PefStatus pef_graph_new(uintptr_t n,
                             const uintptr_t *edges,
                             uintptr_t num_edges,
                             struct PefGraph **out);

// # Safety
// `g` must be null or a handle from this library.
uintptr_t pef_graph_num_vertices(const struct PefGraph *g);

// # Safety
// `g` must be null or a handle from this library, not used afterwards.
void pef_graph_free(struct PefGraph *g);

// Formulation compiled from the clique-vs-stable-set protocol.
//
// # Safety
// `g` must be a graph handle and `out` a valid pointer.
enum PefStatus pef_build_yannakakis(const struct PefGraph *g, struct PefFormulation **out);

// # Safety
// `g` must be a graph handle and `out` a valid pointer.
enum PefStatus pef_build_direct(const struct PefGraph *g,
                                uintptr_t leaf_size,
                                struct PefFormulation **out);

// Fails with `PEF_ERR_FORBIDDEN` when `g` contains `pattern`.
//
// # Safety
// `g` and `pattern` must be graph handles and `out` a valid pointer.
enum PefStatus pef_build_threshold(const struct PefGraph *g,
                                   const struct PefGraph *pattern,
                                   struct PefFormulation **out);

// # Safety
// `g` must be a graph handle and `out` a valid pointer.
enum PefStatus pef_build_clawfree(const struct PefGraph *g,
                                  uintptr_t t,
                                  bool reduced,
                                  struct PefFormulation **out);

// # Safety
// `out` must be a valid pointer.
enum PefStatus pef_build_minupdown(uintptr_t t,
                                   uintptr_t big_l,
                                   uintptr_t ell,
                                   struct PefFormulation **out);

// Parses a formulation from JSON or LP text.
//
// # Safety
// `text` must be a nul-terminated string and `out` a valid pointer.
enum PefStatus pef_formulation_load(const char *text, struct PefFormulation **out);

// JSON text of `f`; free with [`pef_string_free`]. Null on a null handle.
//
// # Safety
// `f` must be null or a formulation handle.
char *pef_formulation_to_json(const struct PefFormulation *f);

// LP text of `f`; free with [`pef_string_free`]. Null on a null handle.
//
// # Safety
// `f` must be null or a formulation handle.
char *pef_formulation_to_lp(const struct PefFormulation *f);

// # Safety
// `f` must be a formulation handle and `out` a valid pointer.
enum PefStatus pef_formulation_size(const struct PefFormulation *f, struct PefSize *out);

// # Safety
// `f` must be null or a handle from this library, not used afterwards.
void pef_formulation_free(struct PefFormulation *f);

// Exact check of `STAB(G) ⊆ π(F) ⊆ QSTAB(G)`.
//
// # Safety
// `g`, `f` must be handles and `passed` a valid pointer.
enum PefStatus pef_check_sandwich(const struct PefGraph *g,
                                  const struct PefFormulation *f,
                                  bool *passed);

// Compares LP maxima of two formulations over the unit directions, the
// all-ones direction and `directions` seeded random ones.
//
// # Safety
// `a`, `b` must be handles and `agree` a valid pointer.
enum PefStatus pef_projections_agree(const struct PefFormulation *a,
                                     const struct PefFormulation *b,
                                     uintptr_t directions,
                                     uint64_t seed,
                                     bool *agree);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PROTOEF_H */
