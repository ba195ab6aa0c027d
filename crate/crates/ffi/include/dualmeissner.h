#ifndef DUALMEISSNER_H
#define DUALMEISSNER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DmStatus {
  DM_STATUS_OK = 0,
  DM_STATUS_NULL_POINTER = 1,
  DM_STATUS_CONFIG = 2,
  DM_STATUS_RANGE = 3,
  DM_STATUS_DOMAIN = 4,
  DM_STATUS_SINGULAR = 5,
  DM_STATUS_UNDEFINED_SIGNAL = 6,
  DM_STATUS_NON_CONVERGENCE = 7,
  DM_STATUS_CORRUPT = 8,
  DM_STATUS_IO = 9,
  DM_STATUS_PANIC = 10,
} DmStatus;

/**
 * Planck-mass convention for [`dm_higgs_mass`].
 */
typedef enum DmPlanck {
  DM_PLANCK_HBAR = 0,
  DM_PLANCK_H = 1,
} DmPlanck;

/**
 * Opaque Monte Carlo chain.
 */
typedef struct DmChain DmChain;

typedef struct DmMagResult {
  double functional;
  size_t iterations;
  bool converged;
  double monopole_density;
} DmMagResult;

typedef struct DmVortexSummary {
  double flux;
  double tension;
  double m_h;
  double m_b;
  double penetration_depth;
  double coherence_length;
  bool type2;
  size_t iterations;
  double residual;
} DmVortexSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t dm_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dm_version(void);

/**
 * Creates a chain on an `lx·ly·lz·lt` lattice, cold or hot started.
 *
 * # Safety
 * `out_chain` must be a valid pointer; the handle must be released with
 * [`dm_chain_free`].
 */
enum DmStatus dm_chain_new(double beta,
                           size_t lx,
                           size_t ly,
                           size_t lz,
                           size_t lt,
                           uint64_t seed,
                           bool hot,
                           size_t overrelax,
                           struct DmChain **out_chain);

/**
 * Loads a snapshot into a new chain. `seed` selects the random streams of
 * subsequent updates.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out_chain` a valid pointer.
 */
enum DmStatus dm_chain_load(const char *path,
                            uint64_t seed,
                            size_t overrelax,
                            struct DmChain **out_chain);

/**
 * # Safety
 * `chain` must be null or a handle from this library not yet freed.
 */
void dm_chain_free(struct DmChain *chain);

/**
 * Runs `n` compound sweeps.
 *
 * # Safety
 * `chain` must be a live handle.
 */
enum DmStatus dm_chain_run(struct DmChain *chain, size_t n);

/**
 * # Safety
 * `chain` must be a live handle and `out_sweeps` valid.
 */
enum DmStatus dm_chain_sweeps(const struct DmChain *chain, uint64_t *out_sweeps);

/**
 * # Safety
 * `chain` must be a live handle and `out_plaquette` valid.
 */
enum DmStatus dm_chain_plaquette(const struct DmChain *chain, double *out_plaquette);

/**
 * Volume-averaged `R×T` Wilson loop.
 *
 * # Safety
 * `chain` must be a live handle and `out_w` valid.
 */
enum DmStatus dm_chain_wilson_loop(const struct DmChain *chain, size_t r, size_t t, double *out_w);

/**
 * Fixes a copy of the current field to the maximal abelian gauge and
 * measures the monopole density. The chain itself is left untouched.
 *
 * # Safety
 * `chain` must be a live handle and `out_result` valid.
 */
enum DmStatus dm_chain_mag(const struct DmChain *chain,
                           double tol,
                           size_t max_iter,
                           struct DmMagResult *out_result);

/**
 * Writes the current field as a snapshot file.
 *
 * # Safety
 * `chain` must be a live handle and `path` a NUL-terminated string.
 */
enum DmStatus dm_chain_save(const struct DmChain *chain, const char *path);

/**
 * # Safety
 * `out_mass` must be valid.
 */
enum DmStatus dm_higgs_mass(double volume, double cs, enum DmPlanck planck, double *out_mass);

/**
 * # Safety
 * `out_efolds` must be valid.
 */
enum DmStatus dm_efolds(double volume, double cs, double *out_efolds);

/**
 * Dual Higgs mass `2v√λ` and dual photon mass `gv`.
 *
 * # Safety
 * Both out-pointers must be valid.
 */
enum DmStatus dm_gl_masses(double g, double lambda, double v, double *out_m_h, double *out_m_b);

/**
 * Solves the winding-`n` flux tube on `n_points` radial nodes (0 picks the
 * default) and summarizes it.
 *
 * # Safety
 * `out_summary` must be valid.
 */
enum DmStatus dm_vortex_solve(double g,
                              double lambda,
                              double v,
                              uint32_t n,
                              size_t n_points,
                              struct DmVortexSummary *out_summary);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DUALMEISSNER_H */
