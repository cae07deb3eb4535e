//! Seeded Monte-Carlo sweeps over geometry × SNR, with simulated (grid-search
//! MUSIC) and predicted (first-order `Δθ`) RMSE, and their file outputs.

mod config;
mod experiment;
mod output;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use config::{ConfigOverrides, ExperimentConfig, GeometrySpec, SchemeName, DEFAULT_GROWTH};
pub use experiment::{run_experiment, run_trial, CellResult, RmsePair, TrialRecord, TrialResults};
pub use output::{
    emit_csv, emit_snapshots, emit_spectrum, format_sig6, write_csv, write_spectrum, CsvRow,
    CSV_HEADER,
};

/// RMSE normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RmseMode {
    /// `sqrt(Σ eᵢ²)`, no division by the trial count.
    Paper,
    /// `sqrt(Σ eᵢ² / L)`.
    Standard,
}

impl RmseMode {
    pub fn name(self) -> &'static str {
        match self {
            RmseMode::Paper => "paper",
            RmseMode::Standard => "standard",
        }
    }
}

/// Which normalizations to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RmseSelection {
    Paper,
    Standard,
    #[default]
    Both,
}

impl RmseSelection {
    pub fn modes(self) -> &'static [RmseMode] {
        match self {
            RmseSelection::Paper => &[RmseMode::Paper],
            RmseSelection::Standard => &[RmseMode::Standard],
            RmseSelection::Both => &[RmseMode::Paper, RmseMode::Standard],
        }
    }
}

pub fn rmse(errors: &[f64], mode: RmseMode) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::EmptyErrors);
    }
    let sum_sq: f64 = errors.iter().map(|e| e * e).sum();
    Ok(match mode {
        RmseMode::Paper => sum_sq.sqrt(),
        RmseMode::Standard => (sum_sq / errors.len() as f64).sqrt(),
    })
}
