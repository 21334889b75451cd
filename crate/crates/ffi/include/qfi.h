#ifndef QFI_H
#define QFI_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum {
  QFI_STATUS_OK = 0,
  QFI_STATUS_NULL_POINTER = 1,
  QFI_STATUS_RANGE = 2,
  QFI_STATUS_COMPLETE_POSITIVITY = 3,
  QFI_STATUS_DOMAIN = 4,
  QFI_STATUS_SIZE = 5,
  QFI_STATUS_NUMERICAL = 6,
  QFI_STATUS_BRACKET = 7,
  QFI_STATUS_DEGENERATE = 8,
  QFI_STATUS_PROBE = 9,
  QFI_STATUS_PANIC = 10,
} QfiStatus;

typedef enum {
  QFI_PRESET_KIND_NOISELESS = 0,
  // `param` is the contraction factor α.
  QFI_PRESET_KIND_DEPOLARIZING = 1,
  // `param` is μ2.
  QFI_PRESET_KIND_PHASE_FLIP = 2,
  // `param` is μ1.
  QFI_PRESET_KIND_AMPLITUDE_DAMPING = 3,
  // `param` is μ1, `mu` the equilibrium bias.
  QFI_PRESET_KIND_GENERALIZED_AMPLITUDE_DAMPING = 4,
} QfiPresetKind;

// Opaque noise handle.
typedef struct QfiNoise QfiNoise;

// Noise parameters of a handle.
typedef struct {
  double mu;
  double mu1;
  double mu2;
  double omega_t;
  double mu0;
} QfiNoiseParams;

typedef struct {
  double value;
  // Natural log of `value`; `-inf` when it vanishes.
  double log_value;
  double beta0;
  double beta1;
} QfiValue;

typedef struct {
  size_t n_opt;
  size_t n_total;
  double kappa_opt;
  double fq_max;
  double log_fq_max;
  // NaN when μ2 = 0.
  double ratio_vs_separable;
  double fq_per_qubit;
  double fq_over_n_sq;
  // The maximum sits at `n_max`.
  bool cap_reached;
} QfiOptimum;

typedef struct {
  double value;
  // Eigenvalue pairs left out of the sum.
  size_t excluded_pairs;
} QfiOracleValue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a noise handle from raw parameters.
//
// # Safety
// `out` must be valid for writes.
QfiStatus qfi_noise_new(double mu, double mu1, double mu2, double omega_t, QfiNoise **out);

// Creates a noise handle for a named preset. `mu` is read only by the
// generalized amplitude damping preset.
//
// # Safety
// `out` must be valid for writes.
QfiStatus qfi_noise_preset(QfiPresetKind kind, double param, double mu, QfiNoise **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `noise` must be null or a handle not yet freed.
void qfi_noise_free(QfiNoise *noise);

// # Safety
// `noise` must be a live handle and `out` valid for writes.
QfiStatus qfi_noise_params(const QfiNoise *noise, QfiNoiseParams *out);

// Closed-form Fisher information of an `n_total`-qubit probe with
// `n_active` exposed qubits and Schmidt coefficient `kappa`.
//
// # Safety
// `noise` must be a live handle and `out` valid for writes.
QfiStatus qfi_compute(const QfiNoise *noise,
                      size_t n_total,
                      size_t n_active,
                      double kappa,
                      QfiValue *out);

// Fisher information `n μ2²` of `n` separable qubits.
//
// # Safety
// `noise` must be a live handle and `out` valid for writes.
QfiStatus qfi_separable_baseline(const QfiNoise *noise, size_t n, double *out);

// # Safety
// `noise` must be a live handle and `out` valid for writes.
QfiStatus qfi_kappa_opt(const QfiNoise *noise, size_t n_total, size_t n_active, double *out);

// Scans active sizes `1..=n_max`. With `optimal_kappa` the Schmidt
// coefficient is re-optimised per size and `kappa` is ignored; with
// `inactive` each candidate carries one extra inactive qubit.
//
// # Safety
// `noise` must be a live handle and `out` valid for writes.
QfiStatus qfi_optimize(const QfiNoise *noise,
                       bool optimal_kappa,
                       double kappa,
                       size_t n_max,
                       bool inactive,
                       QfiOptimum *out);

// Brute-force Fisher information from the dense density matrix, for a probe
// along the axis `(theta, phi)` at phase `xi`. Probes are capped at 12 qubits.
//
// # Safety
// `noise` must be a live handle and `out` valid for writes.
QfiStatus qfi_oracle(const QfiNoise *noise,
                     size_t n_total,
                     size_t n_active,
                     double kappa,
                     double theta,
                     double phi,
                     double xi,
                     QfiOracleValue *out);

// Message for the last failed call on this thread, empty after a success.
// The pointer stays valid until the next call into this library on the
// same thread.
const char *qfi_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *qfi_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QFI_H */
