#ifndef DOA_H
#define DOA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum DoaStatus {
  DOA_STATUS_OK = 0,
  // A required pointer argument was null.
  DOA_STATUS_NULL_POINTER = 1,
  // An argument or config value is out of range.
  DOA_STATUS_INVALID_ARGUMENT = 2,
  // A string argument is not valid UTF-8.
  DOA_STATUS_INVALID_UTF8 = 3,
  // The output buffer is shorter than required.
  DOA_STATUS_BUFFER_TOO_SMALL = 4,
  // The estimator failed on the data (non-finite input, unresolved peaks).
  DOA_STATUS_NUMERICAL = 5,
  // Reading or writing a file failed.
  DOA_STATUS_IO = 6,
  // A Rust panic was caught at the boundary.
  DOA_STATUS_PANIC = 7,
} DoaStatus;

typedef enum DoaProgression {
  DOA_PROGRESSION_ARITHMETIC = 0,
  DOA_PROGRESSION_GEOMETRIC = 1,
} DoaProgression;

typedef enum DoaRmseMode {
  // `sqrt(Σ e²)` over the included trials.
  DOA_RMSE_MODE_PAPER = 0,
  // `sqrt(Σ e² / L)` over the included trials.
  DOA_RMSE_MODE_STANDARD = 1,
} DoaRmseMode;

// Opaque array geometry.
typedef struct DoaGeometry DoaGeometry;

// Opaque result set of a Monte-Carlo sweep.
typedef struct DoaResults DoaResults;

// First-order perturbation of the MUSIC null spectrum at one angle.
typedef struct DoaPerturbation {
  double f1;
  double f2;
  // Predicted angle error in radians; NaN when `degenerate` is set.
  double delta_theta;
  // Non-zero when the second derivative vanishes and no prediction exists.
  uint8_t degenerate;
} DoaPerturbation;

// Aggregates of one (geometry, SNR) cell of a sweep.
typedef struct DoaCell {
  size_t sensors;
  double array_length_hw;
  double snr_db;
  double rmse_sim_deg;
  double rmse_theory_deg;
  size_t trials;
  size_t excluded;
} DoaCell;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *doa_version(void);

// Copy the calling thread's last error message into `buf` (NUL-terminated,
// truncated to `len - 1` bytes) and return the full message length without
// the NUL. Pass `buf = NULL` to query the length only. The message is empty
// after a successful call.
//
// # Safety
//
// `buf` must be null or point to at least `len` writable bytes.
size_t doa_last_error(char *buf, size_t len);

// Uniform linear array of `sensors` elements spanning `half_wavelength_spacings`
// half-wavelengths (must equal `sensors - 1`).
//
// # Safety
//
// `out` must be a valid pointer to writable storage for one handle. On
// success the handle must be released with `doa_geometry_free`.
enum DoaStatus doa_geometry_uniform(size_t sensors,
                                    size_t half_wavelength_spacings,
                                    struct DoaGeometry **out);

// Linear array whose spacings grow by `progression`, rescaled so the last
// sensor sits at `array_length` wavelengths. `growth >= 1`.
//
// # Safety
//
// `out` must be a valid pointer to writable storage for one handle. On
// success the handle must be released with `doa_geometry_free`.
enum DoaStatus doa_geometry_progressive(size_t sensors,
                                        double array_length,
                                        enum DoaProgression progression,
                                        double growth,
                                        struct DoaGeometry **out);

// Release a geometry. Null is ignored.
//
// # Safety
//
// `geom` must be null or a handle from this library that has not been freed.
void doa_geometry_free(struct DoaGeometry *geom);

// Number of sensors, or 0 for a null handle.
//
// # Safety
//
// `geom` must be null or a live geometry handle.
size_t doa_geometry_size(const struct DoaGeometry *geom);

// Array length in wavelengths, or NaN for a null handle.
//
// # Safety
//
// `geom` must be null or a live geometry handle.
double doa_geometry_length(const struct DoaGeometry *geom);

// Copy the sensor positions along the array axis (wavelengths) into `out`.
//
// # Safety
//
// `geom` must be a live geometry handle and `out` must point to `len`
// writable doubles.
enum DoaStatus doa_geometry_positions(const struct DoaGeometry *geom, double *out, size_t len);

// Steering vector at `theta` as `size` interleaved `re, im` pairs.
//
// # Safety
//
// `geom` must be a live geometry handle and `out` must point to `len`
// writable doubles, `len >= 2 * size`.
enum DoaStatus doa_steering_vector(const struct DoaGeometry *geom,
                                   double theta,
                                   double wavelength,
                                   double *out,
                                   size_t len);

// MUSIC estimates of `sources` directions from a block of snapshots, searched
// on the sector grid `resolution_deg .. 180 - resolution_deg`. Estimates are
// written to `out` in ascending order.
//
// `snapshots` holds `size × count` complex samples, row-major by sensor, as
// interleaved `re, im` pairs (`2 × size × count` doubles).
//
// # Safety
//
// `geom` must be a live geometry handle, `snapshots` must point to
// `2 * size * count` readable doubles and `out` to `out_len` writable doubles.
enum DoaStatus doa_estimate(const struct DoaGeometry *geom,
                            const double *snapshots,
                            size_t count,
                            size_t sources,
                            double wavelength,
                            double resolution_deg,
                            double *out,
                            size_t out_len);

// Null-spectrum derivatives and the predicted angle error at `theta`, using
// the noise subspace of the sample covariance of `snapshots` with `sources`
// signals. Buffer layout as in `doa_estimate`.
//
// # Safety
//
// `geom` must be a live geometry handle, `snapshots` must point to
// `2 * size * count` readable doubles and `out` to one writable
// `DoaPerturbation`.
enum DoaStatus doa_perturbation(const struct DoaGeometry *geom,
                                const double *snapshots,
                                size_t count,
                                size_t sources,
                                double theta,
                                struct DoaPerturbation *out);

// Run a Monte-Carlo sweep described by a TOML experiment config.
//
// # Safety
//
// `config_toml` must be a NUL-terminated string and `out` a valid pointer to
// writable storage for one handle. On success the handle must be released
// with `doa_results_free`.
enum DoaStatus doa_experiment_run(const char *config_toml, struct DoaResults **out);

// Release a result set. Null is ignored.
//
// # Safety
//
// `results` must be null or a handle from this library that has not been freed.
void doa_results_free(struct DoaResults *results);

// Number of (geometry, SNR) cells, geometry-major; 0 for a null handle.
//
// # Safety
//
// `results` must be null or a live result handle.
size_t doa_results_cell_count(const struct DoaResults *results);

// Aggregates of cell `index` under `mode`.
//
// # Safety
//
// `results` must be a live result handle and `out` must point to one
// writable `DoaCell`.
enum DoaStatus doa_results_cell(const struct DoaResults *results,
                                size_t index,
                                enum DoaRmseMode mode,
                                struct DoaCell *out);

// Write the sweep's CSV table to `path`.
//
// # Safety
//
// `results` must be a live result handle and `path` a NUL-terminated string.
enum DoaStatus doa_results_write_csv(const struct DoaResults *results, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DOA_H */
