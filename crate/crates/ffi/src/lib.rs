//! C ABI for `doa-core`.
//!
//! Objects cross the boundary as opaque handles (`DoaGeometry`, `DoaResults`)
//! created and released by this library. Every fallible function returns a
//! `DoaStatus`; on anything other than `DOA_STATUS_OK` a message describing the
//! failure can be fetched with `doa_last_error` on the same thread. Panics are
//! caught at the boundary and reported as `DOA_STATUS_PANIC`.
//!
//! Angles are in radians unless a name ends in `_deg`. Positions and
//! wavelengths share one unit; pass `wavelength = 1.0` for positions in
//! wavelengths. Complex buffers are interleaved `re, im` pairs.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use doa_core::geometry::{ArrayGeometry, Progression};
use doa_core::harness::{emit_csv, run_experiment, ExperimentConfig, RmseMode, TrialResults};
use doa_core::perturbation::delta_theta;
use doa_core::signal::{sample_covariance, SnapshotMatrix};
use doa_core::subspace::{eigendecompose_hermitian, estimate_doa, music_spectrum, GridSpec};
use doa_core::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DoaStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument or config value is out of range.
    InvalidArgument = 2,
    /// A string argument is not valid UTF-8.
    InvalidUtf8 = 3,
    /// The output buffer is shorter than required.
    BufferTooSmall = 4,
    /// The estimator failed on the data (non-finite input, unresolved peaks).
    Numerical = 5,
    /// Reading or writing a file failed.
    Io = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DoaProgression {
    Arithmetic = 0,
    Geometric = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DoaRmseMode {
    /// `sqrt(Σ e²)` over the included trials.
    Paper = 0,
    /// `sqrt(Σ e² / L)` over the included trials.
    Standard = 1,
}

/// Opaque array geometry.
pub struct DoaGeometry(ArrayGeometry);

/// Opaque result set of a Monte-Carlo sweep.
pub struct DoaResults(TrialResults);

/// First-order perturbation of the MUSIC null spectrum at one angle.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DoaPerturbation {
    pub f1: f64,
    pub f2: f64,
    /// Predicted angle error in radians; NaN when `degenerate` is set.
    pub delta_theta: f64,
    /// Non-zero when the second derivative vanishes and no prediction exists.
    pub degenerate: u8,
}

/// Aggregates of one (geometry, SNR) cell of a sweep.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DoaCell {
    pub sensors: usize,
    pub array_length_hw: f64,
    pub snr_db: f64,
    pub rmse_sim_deg: f64,
    pub rmse_theory_deg: f64,
    pub trials: usize,
    pub excluded: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(DoaStatus, String);

impl Failure {
    fn new(status: DoaStatus, msg: impl Into<String>) -> Self {
        Self(status, msg.into())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::NonFinite | Error::PeakDeficit { .. } | Error::EmptyErrors => DoaStatus::Numerical,
            Error::Io { .. } | Error::Csv { .. } => DoaStatus::Io,
            _ => DoaStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

/// Run `f`, translating failures and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DoaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            DoaStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_last_error(&format!("panic: {msg}"));
            DoaStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure::new(DoaStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    non_null(p, name)?;
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(DoaStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

fn check_len(got: usize, want: usize, name: &str) -> Result<(), Failure> {
    if got < want {
        Err(Failure::new(DoaStatus::BufferTooSmall, format!("{name} holds {got} values, {want} required")))
    } else {
        Ok(())
    }
}

/// Interleaved `re, im` buffer of `sensors × snapshots` values, row-major by sensor.
unsafe fn snapshot_arg(
    geom: &ArrayGeometry,
    data: *const f64,
    snapshots: usize,
) -> Result<SnapshotMatrix, Failure> {
    non_null(data, "snapshots")?;
    let m = geom.len();
    if snapshots == 0 {
        return Err(Failure::new(DoaStatus::InvalidArgument, "snapshot count must be positive"));
    }
    let buf = std::slice::from_raw_parts(data, 2 * m * snapshots);
    let x = DMatrix::from_fn(m, snapshots, |i, t| {
        let k = 2 * (i * snapshots + t);
        Complex64::new(buf[k], buf[k + 1])
    });
    Ok(SnapshotMatrix::from_matrix(x))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn doa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and return the full message length without
/// the NUL. Pass `buf = NULL` to query the length only. The message is empty
/// after a successful call.
///
/// # Safety
///
/// `buf` must be null or point to at least `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn doa_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Uniform linear array of `sensors` elements spanning `half_wavelength_spacings`
/// half-wavelengths (must equal `sensors - 1`).
///
/// # Safety
///
/// `out` must be a valid pointer to writable storage for one handle. On
/// success the handle must be released with `doa_geometry_free`.
#[no_mangle]
pub unsafe extern "C" fn doa_geometry_uniform(
    sensors: usize,
    half_wavelength_spacings: usize,
    out: *mut *mut DoaGeometry,
) -> DoaStatus {
    guard(|| {
        non_null(out, "out")?;
        let geom = ArrayGeometry::uniform_linear(sensors, half_wavelength_spacings)?;
        *out = Box::into_raw(Box::new(DoaGeometry(geom)));
        Ok(())
    })
}

/// Linear array whose spacings grow by `progression`, rescaled so the last
/// sensor sits at `array_length` wavelengths. `growth >= 1`.
///
/// # Safety
///
/// `out` must be a valid pointer to writable storage for one handle. On
/// success the handle must be released with `doa_geometry_free`.
#[no_mangle]
pub unsafe extern "C" fn doa_geometry_progressive(
    sensors: usize,
    array_length: f64,
    progression: DoaProgression,
    growth: f64,
    out: *mut *mut DoaGeometry,
) -> DoaStatus {
    guard(|| {
        non_null(out, "out")?;
        let progression = match progression {
            DoaProgression::Arithmetic => Progression::Arithmetic,
            DoaProgression::Geometric => Progression::Geometric,
        };
        let geom = ArrayGeometry::nonuniform_progressive(sensors, array_length, progression, growth)?;
        *out = Box::into_raw(Box::new(DoaGeometry(geom)));
        Ok(())
    })
}

/// Release a geometry. Null is ignored.
///
/// # Safety
///
/// `geom` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn doa_geometry_free(geom: *mut DoaGeometry) {
    if !geom.is_null() {
        drop(Box::from_raw(geom));
    }
}

/// Number of sensors, or 0 for a null handle.
///
/// # Safety
///
/// `geom` must be null or a live geometry handle.
#[no_mangle]
pub unsafe extern "C" fn doa_geometry_size(geom: *const DoaGeometry) -> usize {
    geom.as_ref().map_or(0, |g| g.0.len())
}

/// Array length in wavelengths, or NaN for a null handle.
///
/// # Safety
///
/// `geom` must be null or a live geometry handle.
#[no_mangle]
pub unsafe extern "C" fn doa_geometry_length(geom: *const DoaGeometry) -> f64 {
    geom.as_ref().map_or(f64::NAN, |g| g.0.array_length())
}

/// Copy the sensor positions along the array axis (wavelengths) into `out`.
///
/// # Safety
///
/// `geom` must be a live geometry handle and `out` must point to `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn doa_geometry_positions(geom: *const DoaGeometry, out: *mut f64, len: usize) -> DoaStatus {
    guard(|| {
        non_null(geom, "geom")?;
        non_null(out, "out")?;
        let sensors = (*geom).0.sensors();
        check_len(len, sensors.len(), "out")?;
        for (i, s) in sensors.iter().enumerate() {
            *out.add(i) = s.p;
        }
        Ok(())
    })
}

/// Steering vector at `theta` as `size` interleaved `re, im` pairs.
///
/// # Safety
///
/// `geom` must be a live geometry handle and `out` must point to `len`
/// writable doubles, `len >= 2 * size`.
#[no_mangle]
pub unsafe extern "C" fn doa_steering_vector(
    geom: *const DoaGeometry,
    theta: f64,
    wavelength: f64,
    out: *mut f64,
    len: usize,
) -> DoaStatus {
    guard(|| {
        non_null(geom, "geom")?;
        non_null(out, "out")?;
        let geom = &(*geom).0;
        check_len(len, 2 * geom.len(), "out")?;
        if !(theta.is_finite() && wavelength.is_finite() && wavelength > 0.0) {
            return Err(Failure::new(DoaStatus::InvalidArgument, "theta and wavelength must be finite, wavelength > 0"));
        }
        for (i, z) in geom.steering_vector(theta, wavelength).iter().enumerate() {
            *out.add(2 * i) = z.re;
            *out.add(2 * i + 1) = z.im;
        }
        Ok(())
    })
}

/// MUSIC estimates of `sources` directions from a block of snapshots, searched
/// on the sector grid `resolution_deg .. 180 - resolution_deg`. Estimates are
/// written to `out` in ascending order.
///
/// `snapshots` holds `size × count` complex samples, row-major by sensor, as
/// interleaved `re, im` pairs (`2 × size × count` doubles).
///
/// # Safety
///
/// `geom` must be a live geometry handle, `snapshots` must point to
/// `2 * size * count` readable doubles and `out` to `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn doa_estimate(
    geom: *const DoaGeometry,
    snapshots: *const f64,
    count: usize,
    sources: usize,
    wavelength: f64,
    resolution_deg: f64,
    out: *mut f64,
    out_len: usize,
) -> DoaStatus {
    guard(|| {
        non_null(geom, "geom")?;
        non_null(out, "out")?;
        let geom = &(*geom).0;
        check_len(out_len, sources, "out")?;
        let x = snapshot_arg(geom, snapshots, count)?;
        let vn = eigendecompose_hermitian(&sample_covariance(&x))?.noise_subspace(sources)?;
        let spectrum = music_spectrum(geom, wavelength, &vn, GridSpec::sector_degrees(resolution_deg)?)?;
        for (i, theta) in estimate_doa(&spectrum, sources)?.into_iter().enumerate() {
            *out.add(i) = theta;
        }
        Ok(())
    })
}

/// Null-spectrum derivatives and the predicted angle error at `theta`, using
/// the noise subspace of the sample covariance of `snapshots` with `sources`
/// signals. Buffer layout as in `doa_estimate`.
///
/// # Safety
///
/// `geom` must be a live geometry handle, `snapshots` must point to
/// `2 * size * count` readable doubles and `out` to one writable
/// `DoaPerturbation`.
#[no_mangle]
pub unsafe extern "C" fn doa_perturbation(
    geom: *const DoaGeometry,
    snapshots: *const f64,
    count: usize,
    sources: usize,
    theta: f64,
    out: *mut DoaPerturbation,
) -> DoaStatus {
    guard(|| {
        non_null(geom, "geom")?;
        non_null(out, "out")?;
        let geom = &(*geom).0;
        let x = snapshot_arg(geom, snapshots, count)?;
        let vn = eigendecompose_hermitian(&sample_covariance(&x))?.noise_subspace(sources)?;
        let report = delta_theta(geom, theta, &vn);
        *out = DoaPerturbation {
            f1: report.f1,
            f2: report.f2,
            delta_theta: report.delta_theta.unwrap_or(f64::NAN),
            degenerate: report.degenerate() as u8,
        };
        Ok(())
    })
}

/// Run a Monte-Carlo sweep described by a TOML experiment config.
///
/// # Safety
///
/// `config_toml` must be a NUL-terminated string and `out` a valid pointer to
/// writable storage for one handle. On success the handle must be released
/// with `doa_results_free`.
#[no_mangle]
pub unsafe extern "C" fn doa_experiment_run(config_toml: *const c_char, out: *mut *mut DoaResults) -> DoaStatus {
    guard(|| {
        non_null(out, "out")?;
        let cfg = ExperimentConfig::from_toml_str(str_arg(config_toml, "config_toml")?)?;
        let results = run_experiment(&cfg)?;
        *out = Box::into_raw(Box::new(DoaResults(results)));
        Ok(())
    })
}

/// Release a result set. Null is ignored.
///
/// # Safety
///
/// `results` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn doa_results_free(results: *mut DoaResults) {
    if !results.is_null() {
        drop(Box::from_raw(results));
    }
}

/// Number of (geometry, SNR) cells, geometry-major; 0 for a null handle.
///
/// # Safety
///
/// `results` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn doa_results_cell_count(results: *const DoaResults) -> usize {
    results.as_ref().map_or(0, |r| r.0.cells.len())
}

/// Aggregates of cell `index` under `mode`.
///
/// # Safety
///
/// `results` must be a live result handle and `out` must point to one
/// writable `DoaCell`.
#[no_mangle]
pub unsafe extern "C" fn doa_results_cell(
    results: *const DoaResults,
    index: usize,
    mode: DoaRmseMode,
    out: *mut DoaCell,
) -> DoaStatus {
    guard(|| {
        non_null(results, "results")?;
        non_null(out, "out")?;
        let cells = &(*results).0.cells;
        let cell = cells.get(index).ok_or_else(|| {
            Failure::new(DoaStatus::InvalidArgument, format!("cell index {index} out of range ({} cells)", cells.len()))
        })?;
        let r = cell.rmse(match mode {
            DoaRmseMode::Paper => RmseMode::Paper,
            DoaRmseMode::Standard => RmseMode::Standard,
        });
        *out = DoaCell {
            sensors: cell.geometry.sensors,
            array_length_hw: cell.geometry.array_length_half_wavelengths,
            snr_db: cell.snr_db,
            rmse_sim_deg: r.sim.to_degrees(),
            rmse_theory_deg: r.theory.to_degrees(),
            trials: cell.trials.len(),
            excluded: cell.excluded(),
        };
        Ok(())
    })
}

/// Write the sweep's CSV table to `path`.
///
/// # Safety
///
/// `results` must be a live result handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn doa_results_write_csv(results: *const DoaResults, path: *const c_char) -> DoaStatus {
    guard(|| {
        non_null(results, "results")?;
        let path = str_arg(path, "path")?;
        emit_csv(&(*results).0, Path::new(path))?;
        Ok(())
    })
}
