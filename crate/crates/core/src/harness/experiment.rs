use log::info;
use rayon::prelude::*;

use super::config::{ExperimentConfig, GeometrySpec};
use super::{rmse, RmseMode};
use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::perturbation::delta_theta;
use crate::rng::derive_seed;
use crate::signal::{generate_snapshots, sample_covariance, SourceScenario};
use crate::subspace::{eigendecompose_hermitian, estimate_doa, music_spectrum, GridSpec};

/// Outcome of one Monte-Carlo trial, angles in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    /// Grid-search MUSIC estimate; `None` on a peak deficit.
    pub theta_hat: Option<f64>,
    /// `Δθ` evaluated at the true direction; `None` when `f⁽²⁾` is degenerate.
    pub delta_theta: Option<f64>,
}

impl TrialRecord {
    pub fn excluded(&self) -> bool {
        self.theta_hat.is_none() || self.delta_theta.is_none()
    }
}

/// One trial: snapshots, sample covariance, eigendecomposition, then both the
/// grid-search estimate and `Δθ` from the same estimated noise subspace.
pub fn run_trial(geom: &ArrayGeometry, scen: &SourceScenario, grid: GridSpec) -> Result<TrialRecord> {
    let r = sample_covariance(&generate_snapshots(geom, scen)?);
    let vn = eigendecompose_hermitian(&r)?.noise_subspace(scen.doas.len())?;
    let spectrum = music_spectrum(geom, scen.wavelength, &vn, grid)?;
    let theta_hat = match estimate_doa(&spectrum, 1) {
        Ok(est) => Some(est[0]),
        Err(Error::PeakDeficit { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(TrialRecord {
        theta_hat,
        delta_theta: delta_theta(geom, scen.doas[0], &vn).delta_theta,
    })
}

/// Simulated and predicted RMSE under one normalization, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmsePair {
    pub sim: f64,
    pub theory: f64,
}

/// All trials for one (geometry, SNR) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub geometry: GeometrySpec,
    pub snr_db: f64,
    pub theta_true: f64,
    pub trials: Vec<TrialRecord>,
}

impl CellResult {
    pub fn excluded(&self) -> usize {
        self.trials.iter().filter(|t| t.excluded()).count()
    }

    pub fn included(&self) -> usize {
        self.trials.len() - self.excluded()
    }

    /// Per-trial simulated and predicted errors over the included trials.
    pub fn errors(&self) -> (Vec<f64>, Vec<f64>) {
        self.trials
            .iter()
            .filter_map(|t| match (t.theta_hat, t.delta_theta) {
                (Some(hat), Some(dt)) => Some((hat - self.theta_true, dt)),
                _ => None,
            })
            .unzip()
    }

    /// Aggregates recomputed from the trial list; NaN when every trial was excluded.
    pub fn rmse(&self, mode: RmseMode) -> RmsePair {
        let (sim, theory) = self.errors();
        RmsePair {
            sim: rmse(&sim, mode).unwrap_or(f64::NAN),
            theory: rmse(&theory, mode).unwrap_or(f64::NAN),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResults {
    pub config: ExperimentConfig,
    /// Geometry-major, then SNR in config order.
    pub cells: Vec<CellResult>,
}

impl TrialResults {
    pub fn cell(&self, geometry: usize, snr: usize) -> &CellResult {
        &self.cells[geometry * self.config.snr_db_list.len() + snr]
    }
}

fn check_equal_lengths(specs: &[GeometrySpec], geoms: &[ArrayGeometry]) -> Result<()> {
    if let Some(first) = geoms.first() {
        for (spec, g) in specs.iter().zip(geoms).skip(1) {
            if g.array_length() != first.array_length() {
                return Err(Error::UnequalLength {
                    first: specs[0].label(),
                    second: spec.label(),
                    first_len: first.array_length(),
                    second_len: g.array_length(),
                });
            }
        }
    }
    Ok(())
}

/// Run every (geometry, SNR, trial) combination. Trial `t` of geometry `g`
/// at SNR index `s` uses seed `derive_seed(master_seed, [g, s, t])`, so the
/// result does not depend on the number of worker threads.
pub fn run_experiment(config: &ExperimentConfig) -> Result<TrialResults> {
    config.validate()?;
    let geoms = config
        .geometries
        .iter()
        .map(GeometrySpec::build)
        .collect::<Result<Vec<_>>>()?;
    check_equal_lengths(&config.geometries, &geoms)?;

    let grid = GridSpec::sector_degrees(config.resolution_deg)?;
    let theta = config.theta_true_deg.to_radians();
    let n_snr = config.snr_db_list.len();
    let trials = config.trials;

    let jobs: Vec<(usize, usize, usize)> = (0..geoms.len())
        .flat_map(|g| (0..n_snr).flat_map(move |s| (0..trials).map(move |t| (g, s, t))))
        .collect();
    info!(
        "running {} trials ({} geometries x {} SNRs x {})",
        jobs.len(),
        geoms.len(),
        n_snr,
        trials
    );

    let records = jobs
        .par_iter()
        .map(|&(g, s, t)| {
            let scen = SourceScenario {
                doas: vec![theta],
                snr_db: config.snr_db_list[s],
                snapshots: config.snapshots,
                wavelength: 1.0,
                seed: derive_seed(config.master_seed, &[g as u64, s as u64, t as u64]),
            };
            run_trial(&geoms[g], &scen, grid)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut cells = Vec::with_capacity(geoms.len() * n_snr);
    let mut chunks = records.chunks(trials.max(1));
    for spec in &config.geometries {
        for &snr_db in &config.snr_db_list {
            let chunk = chunks.next().unwrap_or_default();
            cells.push(CellResult {
                geometry: spec.clone(),
                snr_db,
                theta_true: theta,
                trials: chunk.to_vec(),
            });
        }
    }
    Ok(TrialResults { config: config.clone(), cells })
}
