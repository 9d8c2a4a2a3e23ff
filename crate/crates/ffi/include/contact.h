#ifndef CONTACT_H
#define CONTACT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ContactStatus {
  CONTACT_STATUS_OK = 0,
  CONTACT_STATUS_DOMAIN = 1,
  CONTACT_STATUS_POLE = 2,
  CONTACT_STATUS_PRECONDITION = 3,
  CONTACT_STATUS_SIZE = 4,
  CONTACT_STATUS_HYPERPLANE = 5,
  CONTACT_STATUS_INVALID_PARAMS = 6,
  CONTACT_STATUS_NULL_POINTER = 7,
  CONTACT_STATUS_BUFFER_TOO_SMALL = 8,
  CONTACT_STATUS_PANIC = 9,
} ContactStatus;

typedef enum ContactFamilyKind {
  CONTACT_FAMILY_KIND_DELTA = 0,
  CONTACT_FAMILY_KIND_ANTI_DELTA = 1,
  CONTACT_FAMILY_KIND_SEPARATED = 2,
} ContactFamilyKind;

/**
 * Opaque spin system handle.
 */
typedef struct ContactSystem ContactSystem;

/**
 * Opaque wavefunction handle.
 */
typedef struct ContactWaveFunction ContactWaveFunction;

/**
 * An integrable family. `strength` is `c` for the delta families and `h`
 * for the separated one, where `INFINITY` selects the hard wall.
 */
typedef struct ContactFamily {
  enum ContactFamilyKind kind;
  double strength;
} ContactFamily;

typedef struct ContactComplex {
  double re;
  double im;
} ContactComplex;

/**
 * General nonseparated parameters; must satisfy `ad - bc = 1`.
 */
typedef struct ContactGeneralParams {
  double theta;
  double a;
  double b;
  double c;
  double d;
} ContactGeneralParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *contact_last_error_message(void);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum ContactStatus contact_system_new(size_t particles,
                                      size_t spin_states,
                                      bool fermion,
                                      struct ContactSystem **out);

/**
 * `n^N`, or 0 for a null handle.
 *
 * # Safety
 * `system` must be null or a handle from [`contact_system_new`].
 */
size_t contact_system_dim(const struct ContactSystem *system);

/**
 * # Safety
 * `system` must be null or a handle from [`contact_system_new`] not yet freed.
 */
void contact_system_free(struct ContactSystem *system);

/**
 * Two-site Y-operator of `family` at spectral parameter `k_diff`, written as
 * an `n^2 x n^2` row-major matrix.
 *
 * # Safety
 * `out` must point to `out_len` writable values.
 */
enum ContactStatus contact_y_matrix(struct ContactFamily family,
                                    struct ContactComplex k_diff,
                                    size_t spin_states,
                                    bool fermion,
                                    struct ContactComplex *out,
                                    size_t out_len);

/**
 * N-body scattering matrix for `k_len = N` momenta, `dim x dim` row-major.
 *
 * # Safety
 * `system` must be a live handle, `k` must hold `k_len` values and `out`
 * must have room for `out_len` values.
 */
enum ContactStatus contact_s_matrix(struct ContactFamily family,
                                    const struct ContactSystem *system,
                                    const struct ContactComplex *k,
                                    size_t k_len,
                                    struct ContactComplex *out,
                                    size_t out_len);

/**
 * Largest of the Yang-Baxter, inverse and commutation residuals at the
 * momentum triple `k[0..3]`.
 *
 * # Safety
 * `k` must hold three values and `out_residual` must be writable.
 */
enum ContactStatus contact_ybe_residual(struct ContactFamily family,
                                        size_t spin_states,
                                        bool fermion,
                                        const struct ContactComplex *k,
                                        double *out_residual);

/**
 * Same as [`contact_ybe_residual`] for general nonseparated parameters.
 *
 * # Safety
 * As for [`contact_ybe_residual`].
 */
enum ContactStatus contact_ybe_residual_general(struct ContactGeneralParams params,
                                                size_t spin_states,
                                                bool fermion,
                                                const struct ContactComplex *k,
                                                double *out_residual);

/**
 * `-h^2 N (N^2 - 1) / 3`.
 */
double contact_bound_energy(size_t particles, double h);

/**
 * The bound-state ladder `k_j = ih(N + 1 - 2j)` into `out[0..N]`.
 *
 * # Safety
 * `out` must have room for `out_len` values.
 */
enum ContactStatus contact_bound_momenta(size_t particles,
                                         double h,
                                         struct ContactComplex *out,
                                         size_t out_len);

/**
 * Build the Bethe wavefunction of `family` with momenta `k` and initial
 * coefficients `initial` (length `dim`).
 *
 * # Safety
 * Pointers must be valid for the given lengths; `out` receives a handle to
 * release with [`contact_wavefunction_free`].
 */
enum ContactStatus contact_wavefunction_new(struct ContactFamily family,
                                            const struct ContactSystem *system,
                                            const struct ContactComplex *k,
                                            size_t k_len,
                                            const struct ContactComplex *initial,
                                            size_t initial_len,
                                            struct ContactWaveFunction **out);

/**
 * `psi(x)` at `x[0..N]` off the coincidence planes, into `out[0..dim]`.
 *
 * # Safety
 * `wf` must be a live handle; buffers must be valid for their lengths.
 */
enum ContactStatus contact_wavefunction_evaluate(const struct ContactWaveFunction *wf,
                                                 const double *x,
                                                 size_t x_len,
                                                 struct ContactComplex *out,
                                                 size_t out_len);

/**
 * # Safety
 * `wf` must be null or a handle from [`contact_wavefunction_new`] not yet freed.
 */
void contact_wavefunction_free(struct ContactWaveFunction *wf);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONTACT_H */
