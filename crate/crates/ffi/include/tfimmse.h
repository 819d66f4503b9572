#ifndef TFIMMSE_H
#define TFIMMSE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Channel field convention.
typedef enum TfiField {
  TFI_FIELD_REAL = 0,
  TFI_FIELD_COMPLEX = 1,
} TfiField;

// Input prior for the estimation entry points.
typedef enum TfiPrior {
  TFI_PRIOR_GAUSSIAN = 0,
  TFI_PRIOR_BPSK = 1,
} TfiPrior;

// Call outcome. Anything but `Ok` leaves a message readable through
// `tfi_last_error`.
typedef enum TfiStatus {
  TFI_STATUS_OK = 0,
  // A required pointer argument was null.
  TFI_STATUS_NULL_ARGUMENT = 1,
  // Arguments were structurally invalid (sizes, ranges, enums).
  TFI_STATUS_INVALID_ARGUMENT = 2,
  // The library rejected the request.
  TFI_STATUS_RUNTIME_ERROR = 3,
  // An internal panic was caught at the boundary.
  TFI_STATUS_PANIC = 4,
} TfiStatus;

// Term-table numerator variant.
typedef enum TfiVariant {
  TFI_VARIANT_LITERAL = 0,
  TFI_VARIANT_SQUARED = 1,
} TfiVariant;

// Opaque time-frequency distribution handle.
typedef struct TfiDist TfiDist;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the message of the most recent failure on this thread into
// `buf` (NUL-terminated, truncated to `cap`). Returns the full message
// length in bytes, excluding the terminator; 0 means no stored message.
//
// # Safety
// `buf` must point to `cap` writable bytes, or be null (then only the
// length is returned).
size_t tfi_last_error(char *buf, size_t cap);

// Library version as a static NUL-terminated string.
const char *tfi_version(void);

// Wigner distribution of one signal. `im` may be null for a real
// signal. On success `*out` owns a handle to free with `tfi_dist_free`.
//
// # Safety
// `re` (and `im` when non-null) must point to `n` readable doubles;
// `out` must be a valid pointer.
enum TfiStatus tfi_wigner(const double *re,
                          const double *im,
                          size_t n,
                          double sample_rate,
                          bool analytic,
                          struct TfiDist **out);

// Cross-Wigner distribution of two equal-length signals.
//
// # Safety
// All non-null data pointers must cover `n` doubles; `out` must be
// valid. `im1`/`im2` may be null.
enum TfiStatus tfi_cross_wigner(const double *re1,
                                const double *im1,
                                const double *re2,
                                const double *im2,
                                size_t n,
                                double sample_rate,
                                struct TfiDist **out);

// Number of time slices in a distribution; 0 for a null handle.
//
// # Safety
// `dist` must be null or a live handle from this library.
size_t tfi_dist_time_bins(const struct TfiDist *dist);

// Number of frequency bins in a distribution; 0 for a null handle.
//
// # Safety
// `dist` must be null or a live handle from this library.
size_t tfi_dist_freq_bins(const struct TfiDist *dist);

// Copies the grid row-major (time outer, frequency inner) into the two
// arrays, each of capacity `cap` >= time_bins * freq_bins. `out_im` may
// be null to take only real parts.
//
// # Safety
// `dist` must be a live handle; `out_re` (and `out_im` when non-null)
// must point to `cap` writable doubles.
enum TfiStatus tfi_dist_copy(const struct TfiDist *dist,
                             double *out_re,
                             double *out_im,
                             size_t cap);

// Grid integral with the cell area weight.
//
// # Safety
// `dist` must be a live handle; the out pointers must be valid.
enum TfiStatus tfi_dist_integral(const struct TfiDist *dist, double *out_re, double *out_im);

// Releases a distribution handle. Null is a no-op.
//
// # Safety
// `dist` must be null or an owned handle that is not used afterwards.
void tfi_dist_free(struct TfiDist *dist);

// Reconstruction loss of a flat-band source observed through a filtered
// sub-Nyquist sampler with flat noise: writes the frequency-domain mmse
// and the reconstruction energy.
//
// # Safety
// `out_mmse` and `out_recon_energy` must be valid pointers.
enum TfiStatus tfi_sampling_mmse(double psd_level,
                                 double psd_band,
                                 double noise_level,
                                 double f_max,
                                 double grid_step,
                                 double fs_sub,
                                 double cutoff,
                                 uint32_t alias_terms,
                                 double *out_mmse,
                                 double *out_recon_energy);

// I-MMSE identity sweep for one- or two-input channels with unit-power
// priors. Writes, per grid point, the information derivative, the
// identity residual, and its standard error. `prior2` is ignored when
// `n_inputs` is 1.
//
// # Safety
// `snr_grid` must cover `grid_len` doubles; the three out arrays must
// each cover `grid_len` writable doubles.
enum TfiStatus tfi_immse_sweep(enum TfiPrior prior1,
                               enum TfiPrior prior2,
                               uint32_t n_inputs,
                               double rho,
                               enum TfiField field,
                               const double *snr_grid,
                               size_t grid_len,
                               uint64_t n_samples,
                               uint64_t seed,
                               double *out_dmi_dsnr,
                               double *out_residual,
                               double *out_residual_stderr);

// Evaluates the 18-term time-frequency decomposition on an ensemble of
// flat-band Gaussian mixtures. Writes the signed term values into the
// two length-18 arrays (table order), the grand total, and the guarded
// cell count.
//
// # Safety
// `out_terms_re` and `out_terms_im` must each cover 18 writable
// doubles; the scalar out pointers must be valid.
enum TfiStatus tfi_tf_immse(double psd_level,
                            double psd_band,
                            double psd_step,
                            bool x2_enabled,
                            double rho,
                            double snr,
                            enum TfiField field,
                            size_t n,
                            double sample_rate,
                            size_t n_realizations,
                            double fs_sub,
                            double cutoff,
                            uint32_t alias_terms,
                            enum TfiVariant variant,
                            uint64_t seed,
                            double *out_terms_re,
                            double *out_terms_im,
                            double *out_total_re,
                            double *out_total_im,
                            size_t *out_guarded_cells);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TFIMMSE_H */
