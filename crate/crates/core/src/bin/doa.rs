use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, ValueEnum};
use log::info;

use doa_core::harness::{
    emit_csv, emit_snapshots, emit_spectrum, run_experiment, write_csv, ConfigOverrides,
    ExperimentConfig, RmseMode, RmseSelection, SchemeName, TrialResults,
};
use doa_core::rng::derive_seed;
use doa_core::signal::{generate_snapshots, SourceScenario};
use doa_core::subspace::GridSpec;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    Table1,
    Table2,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    Uniform,
    Arithmetic,
    Geometric,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Paper,
    Standard,
    Both,
}

/// Monte-Carlo RMSE sweep of MUSIC direction finding on uniform and
/// progressively spaced linear arrays of equal length.
///
/// The CSV goes to --out-csv, or to standard output when that is not given.
/// Progress and the summary table go to standard error.
#[derive(Debug, Parser)]
#[command(name = "doa", version)]
struct Cli {
    /// TOML experiment config
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Built-in base config, used when --config is absent
    #[arg(long, value_enum, default_value = "table1")]
    preset: Preset,
    #[arg(long, allow_negative_numbers = true)]
    theta_deg: Option<f64>,
    /// SNR in dB (repeatable)
    #[arg(long, allow_negative_numbers = true)]
    snr_db: Vec<f64>,
    /// Sensor count of one geometry (repeatable)
    #[arg(long)]
    sensors: Vec<usize>,
    /// Common array length in half-wavelengths
    #[arg(long)]
    length_hw: Option<f64>,
    /// Force one scheme for every geometry (default: uniform when M-1 equals
    /// the length, geometric otherwise)
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long)]
    growth: Option<f64>,
    #[arg(long)]
    snapshots: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    resolution_deg: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    rmse_mode: Option<ModeArg>,
    #[arg(long, value_name = "PATH")]
    out_csv: Option<PathBuf>,
    /// Write the MUSIC spectrum of trial 0 (first geometry, first SNR)
    #[arg(long, value_name = "PATH")]
    dump_spectrum: Option<PathBuf>,
    /// Write the snapshot block of trial 0 (first geometry, first SNR)
    #[arg(long, value_name = "PATH")]
    dump_snapshots: Option<PathBuf>,
    /// Worker threads (results do not depend on this)
    #[arg(long)]
    threads: Option<usize>,
    /// Print the resolved config as TOML and exit
    #[arg(long)]
    print_config: bool,
}

impl Cli {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            theta_deg: self.theta_deg,
            snr_db: self.snr_db.clone(),
            sensors: self.sensors.clone(),
            length_hw: self.length_hw,
            scheme: self.scheme.map(|s| match s {
                SchemeArg::Uniform => SchemeName::Uniform,
                SchemeArg::Arithmetic => SchemeName::Arithmetic,
                SchemeArg::Geometric => SchemeName::Geometric,
            }),
            growth: self.growth,
            snapshots: self.snapshots,
            trials: self.trials,
            resolution_deg: self.resolution_deg,
            seed: self.seed,
            rmse_mode: self.rmse_mode.map(|m| match m {
                ModeArg::Paper => RmseSelection::Paper,
                ModeArg::Standard => RmseSelection::Standard,
                ModeArg::Both => RmseSelection::Both,
            }),
        }
    }

    fn resolve_config(&self) -> Result<ExperimentConfig> {
        let base = match (&self.config, self.preset) {
            (Some(path), _) => ExperimentConfig::load(path)?,
            (None, Preset::Table1) => ExperimentConfig::table1(),
            (None, Preset::Table2) => ExperimentConfig::table2(),
        };
        Ok(self.overrides().apply(base)?)
    }
}

/// Trial-0 scenario of the first (geometry, SNR) cell.
fn first_trial(cfg: &ExperimentConfig) -> Option<SourceScenario> {
    let snr_db = *cfg.snr_db_list.first()?;
    Some(SourceScenario {
        doas: vec![cfg.theta_true_deg.to_radians()],
        snr_db,
        snapshots: cfg.snapshots,
        wavelength: 1.0,
        seed: derive_seed(cfg.master_seed, &[0, 0, 0]),
    })
}

fn print_summary(results: &TrialResults) {
    let mode = match results.config.rmse_mode {
        RmseSelection::Standard => RmseMode::Standard,
        _ => RmseMode::Paper,
    };
    eprintln!(
        "\nRMSE ({} mode, degrees), theta = {} deg, N = {}, L = {}",
        mode.name(),
        results.config.theta_true_deg,
        results.config.snapshots,
        results.config.trials
    );
    eprintln!(
        "{:<20} {:>8} {:>14} {:>14} {:>10} {:>9}",
        "geometry", "snr_db", "simulated", "theoretical", "sim/theory", "excluded"
    );
    for cell in &results.cells {
        let r = cell.rmse(mode);
        eprintln!(
            "{:<20} {:>8} {:>14.6e} {:>14.6e} {:>10.3} {:>9}",
            cell.geometry.label(),
            cell.snr_db,
            r.sim.to_degrees(),
            r.theory.to_degrees(),
            r.sim / r.theory,
            cell.excluded()
        );
    }

    // Each non-uniform layout against the uniform one at the same SNR, in both directions.
    let n_snr = results.config.snr_db_list.len();
    let Some(reference) = results
        .config
        .geometries
        .iter()
        .position(|g| g.scheme == SchemeName::Uniform)
    else {
        return;
    };
    eprintln!("\nsimulated RMSE relative to {}:", results.config.geometries[reference].label());
    for (g, spec) in results.config.geometries.iter().enumerate() {
        if g == reference {
            continue;
        }
        for s in 0..n_snr {
            let other = results.cell(g, s).rmse(mode).sim;
            let base = results.cell(reference, s).rmse(mode).sim;
            let verdict = if other < base { "lower" } else if other > base { "higher" } else { "equal" };
            eprintln!(
                "  {:<20} snr {:>6} dB: ratio {:.3} ({verdict})",
                spec.label(),
                results.config.snr_db_list[s],
                other / base
            );
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    let cfg = cli.resolve_config()?;
    if cli.print_config {
        print!("{}", cfg.to_toml_string());
        return Ok(());
    }

    if cli.dump_spectrum.is_some() || cli.dump_snapshots.is_some() {
        let spec = cfg.geometries.first().context("no geometries configured")?;
        let geom = spec.build()?;
        let scen = first_trial(&cfg).context("no SNR values configured")?;
        if let Some(path) = &cli.dump_spectrum {
            emit_spectrum(&geom, &scen, GridSpec::sector_degrees(cfg.resolution_deg)?, path)?;
            info!("wrote spectrum to {}", path.display());
        }
        if let Some(path) = &cli.dump_snapshots {
            emit_snapshots(&generate_snapshots(&geom, &scen)?, path)?;
            info!("wrote snapshots to {}", path.display());
        }
    }

    let results = run_experiment(&cfg)?;
    match &cli.out_csv {
        Some(path) => {
            emit_csv(&results, path)?;
            info!("wrote {}", path.display());
        }
        None => write_csv(&results, io::stdout().lock()).context("writing CSV to stdout")?,
    }
    print_summary(&results);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
