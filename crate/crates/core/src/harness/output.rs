//! File outputs: the RMSE table (CSV), spectrum dumps and snapshot dumps.
//!
//! CSV columns:
//!
//! ```text
//! geometry,scheme,M,array_length_hw,snr_db,rmse_sim_deg,rmse_theory_deg,mode,trials,excluded
//! ```
//!
//! One row per (geometry, SNR, RMSE mode); RMSE values in degrees with six
//! significant digits (`8.59000e-2`), `NaN` when every trial was excluded.
//!
//! Spectrum dumps hold one `angle_deg value` line per grid point. Snapshot
//! dumps are CSV with one row per sensor and an interleaved `re,im` pair per
//! snapshot.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Deserialize;

use super::experiment::TrialResults;
use super::RmseMode;
use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::signal::{generate_snapshots, sample_covariance, SnapshotMatrix, SourceScenario};
use crate::subspace::{eigendecompose_hermitian, music_spectrum, GridSpec, SpectrumGrid};

pub const CSV_HEADER: [&str; 10] = [
    "geometry",
    "scheme",
    "M",
    "array_length_hw",
    "snr_db",
    "rmse_sim_deg",
    "rmse_theory_deg",
    "mode",
    "trials",
    "excluded",
];

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CsvRow {
    pub geometry: String,
    pub scheme: String,
    #[serde(rename = "M")]
    pub sensors: usize,
    pub array_length_hw: f64,
    pub snr_db: f64,
    pub rmse_sim_deg: f64,
    pub rmse_theory_deg: f64,
    pub mode: RmseMode,
    pub trials: usize,
    pub excluded: usize,
}

/// Six significant digits in scientific notation.
pub fn format_sig6(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.5e}")
    } else {
        format!("{v}")
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

/// Write the RMSE table for the config's selected modes.
pub fn write_csv<W: Write>(results: &TrialResults, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for cell in &results.cells {
        for &mode in results.config.rmse_mode.modes() {
            let r = cell.rmse(mode);
            w.write_record([
                cell.geometry.label(),
                cell.geometry.scheme.name().to_string(),
                cell.geometry.sensors.to_string(),
                cell.geometry.array_length_half_wavelengths.to_string(),
                cell.snr_db.to_string(),
                format_sig6(r.sim.to_degrees()),
                format_sig6(r.theory.to_degrees()),
                mode.name().to_string(),
                cell.trials.len().to_string(),
                cell.excluded().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(results: &TrialResults, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    write_csv(results, BufWriter::new(file)).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_spectrum<W: Write>(spectrum: &SpectrumGrid, mut out: W) -> std::io::Result<()> {
    for (angle, value) in spectrum.angles().zip(&spectrum.values) {
        writeln!(out, "{:.6} {:.9e}", angle.to_degrees(), value)?;
    }
    out.flush()
}

/// Compute the MUSIC spectrum of one seeded realization of `scen` and dump it.
pub fn emit_spectrum(
    geom: &ArrayGeometry,
    scen: &SourceScenario,
    grid: GridSpec,
    path: &Path,
) -> Result<SpectrumGrid> {
    let r = sample_covariance(&generate_snapshots(geom, scen)?);
    let vn = eigendecompose_hermitian(&r)?.noise_subspace(scen.doas.len())?;
    let spectrum = music_spectrum(geom, scen.wavelength, &vn, grid)?;
    let file = File::create(path).map_err(io_err(path))?;
    write_spectrum(&spectrum, BufWriter::new(file)).map_err(io_err(path))?;
    Ok(spectrum)
}

pub fn emit_snapshots(x: &SnapshotMatrix, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let data = x.data();
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    for i in 0..data.nrows() {
        let row: Vec<String> = data
            .row(i)
            .iter()
            .flat_map(|z| [z.re.to_string(), z.im.to_string()])
            .collect();
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}
