#ifndef MARKOV_ISO_H
#define MARKOV_ISO_H

#pragma once

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum MiStatus {
  MI_STATUS_OK = 0,
  MI_STATUS_NULL_POINTER = 1,
  MI_STATUS_INVALID_ARGUMENT = 2,
  // Reducible chain, disconnected graph, isolated or sink vertex.
  MI_STATUS_NOT_IRREDUCIBLE = 3,
  MI_STATUS_NOT_REVERSIBLE = 4,
  // Input exceeds the exact enumeration cap.
  MI_STATUS_TOO_LARGE = 5,
  MI_STATUS_NUMERICAL = 6,
  MI_STATUS_BUFFER_TOO_SMALL = 7,
  MI_STATUS_PANIC = 8,
} MiStatus;

// Opaque chain handle.
typedef struct MiChain MiChain;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version string of the library; static, never freed.
const char *mi_version(void);

// Message of the last failed call on this thread. Valid until the next failing call on the same thread.
const char *mi_last_error(void);

// Chain from an `n × n` row-major transition matrix.
//
// # Safety
// `p` must point to `n*n` doubles and `out` to writable storage for a handle.
enum MiStatus mi_chain_from_transition(const double *p, uintptr_t n, struct MiChain **out);

// Random walk on a weighted graph with `m` edges `(u[i], v[i], w[i])`.
//
// # Safety
// `u`, `v` and `w` must each point to `m` elements; `out` to writable storage for a handle.
enum MiStatus mi_chain_from_edges(uintptr_t n,
                                  bool directed,
                                  const uintptr_t *u,
                                  const uintptr_t *v,
                                  const double *w,
                                  uintptr_t m,
                                  struct MiChain **out);

// The cubic-decay circulant `G_n`, `P(i,j) ∝ 1/min(|i−j|, n−|i−j|)³`.
//
// # Safety
// `out` must point to writable storage for a handle.
enum MiStatus mi_chain_ht_counterexample(uintptr_t n, struct MiChain **out);

// Release a handle. Null is ignored.
//
// # Safety
// `chain` must come from an `mi_chain_*` constructor and not have been freed.
void mi_chain_free(struct MiChain *chain);

// Number of states, or 0 for a null handle.
//
// # Safety
// `chain` must be null or a live handle.
uintptr_t mi_chain_n(const struct MiChain *chain);

// Copy `π` into `out`, which holds `len ≥ n` doubles.
//
// # Safety
// `chain` must be a live handle and `out` must point to `len` writable doubles.
enum MiStatus mi_chain_stationary(const struct MiChain *chain, double *out, uintptr_t len);

// `λ₂` of the normalized Laplacian, or of Chung's directed Laplacian when `directed` is set.
//
// # Safety
// `chain` must be a live handle and `out` writable.
enum MiStatus mi_lambda2(const struct MiChain *chain, bool directed, double *out);

// `φ_p(S)` for the `len` vertices in `set`.
//
// # Safety
// `chain` must be a live handle, `set` must point to `len` ids and `out` be writable.
enum MiStatus mi_phi_of_set(const struct MiChain *chain,
                            const uintptr_t *set,
                            uintptr_t len,
                            double p,
                            double *out);

// Exact `φ_p` by enumeration; `membership` (optional) receives the minimizing set.
//
// # Safety
// `chain` must be a live handle, `phi` writable, and `membership` null or `len` writable bytes.
enum MiStatus mi_phi_exact(const struct MiChain *chain,
                           double p,
                           double *phi,
                           uint8_t *membership,
                           uintptr_t len);

// Best level set of the truncated second eigenvector.
//
// # Safety
// Same contract as [`mi_phi_exact`].
enum MiStatus mi_sweep_cut(const struct MiChain *chain,
                           double p,
                           bool directed,
                           double *phi,
                           uint8_t *membership,
                           uintptr_t len);

// `λ₂` of `G_n` from its circulant spectrum, without building the matrix.
//
// # Safety
// `out` must be writable.
enum MiStatus mi_ht_lambda2(uintptr_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MARKOV_ISO_H */
