//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line and then
//! asserts; run with `--nocapture` to see the lines.

mod common;

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use doa_core::geometry::{ArrayGeometry, Progression};
use doa_core::harness::{run_experiment, write_csv, ExperimentConfig, RmseMode, TrialResults};
use doa_core::perturbation::{delta_theta, delta_theta_expanded, f1, f2};
use doa_core::signal::{analytic_covariance, SourceScenario};
use doa_core::subspace::{eigendecompose_hermitian, estimate_doa, music_spectrum, null_spectrum, GridSpec};

const RANDOM_DRAWS: usize = 100;

/// Paper-mode simulated RMSE band for uniform M=11 at θ=60°, degrees.
const TABLE1_SIM_LOW_DEG: f64 = 71.6e-3;
const TABLE1_SIM_HIGH_DEG: f64 = 93.8e-3;
const TABLE1_FACTOR: f64 = 2.0;
const SWEEP_TIME_LIMIT: Duration = Duration::from_secs(120);

fn report(id: &str, pass: bool, detail: String) {
    println!("[{}] {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{id} failed: {detail}");
}

struct Table1 {
    results: TrialResults,
    elapsed: Duration,
}

fn table1() -> &'static Table1 {
    static RUN: OnceLock<Table1> = OnceLock::new();
    RUN.get_or_init(|| {
        let start = Instant::now();
        let results = run_experiment(&ExperimentConfig::table1()).unwrap();
        Table1 { results, elapsed: start.elapsed() }
    })
}

/// Stochastic Cramér–Rao bound on the per-trial DOA standard deviation for one
/// unit-power source, radians. Context for C4 only.
fn crb_std(geom: &ArrayGeometry, theta: f64, snr_db: f64, snapshots: usize) -> f64 {
    let d = geom.steering_with_derivatives(theta, 1.0);
    let m = geom.len() as f64;
    let h = d.first.norm_squared() - d.value.dotc(&d.first).norm_sqr() / m;
    let sigma2 = 10f64.powf(-snr_db / 10.0);
    (sigma2 / (2.0 * snapshots as f64 * h) * (1.0 + sigma2 / m)).sqrt()
}

fn csv_bytes(results: &TrialResults) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(results, &mut buf).unwrap();
    buf
}

#[test]
fn c1_zero_noise_oracle() {
    let geoms = [
        ("uniform M=11", ArrayGeometry::uniform_linear(11, 10).unwrap()),
        ("geometric M=8", ArrayGeometry::nonuniform_progressive(8, 5.0, Progression::Geometric, 1.3).unwrap()),
        ("geometric M=5", ArrayGeometry::nonuniform_progressive(5, 5.0, Progression::Geometric, 1.3).unwrap()),
    ];
    let grid = GridSpec::sector_degrees(0.01).unwrap();
    let mut worst: f64 = 0.0;
    for (_, geom) in &geoms {
        for deg in [50.0f64, 60.0] {
            for snr_db in [f64::INFINITY, 0.0] {
                let scen = SourceScenario::single(deg.to_radians(), snr_db, 1, 0);
                let r = analytic_covariance(geom, &scen).unwrap();
                let vn = eigendecompose_hermitian(&r).unwrap().noise_subspace(1).unwrap();
                let spectrum = music_spectrum(geom, 1.0, &vn, grid).unwrap();
                let est = estimate_doa(&spectrum, 1).unwrap()[0].to_degrees();
                worst = worst.max((est - deg).abs());
            }
        }
    }
    report(
        "C1 zero-noise oracle",
        worst <= 0.01,
        format!("worst |θ̂ − θ| = {worst:.2e} deg (limit 0.01)"),
    );
}

#[test]
fn c2_derivative_fidelity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst1, mut worst2): (f64, f64) = (0.0, 0.0);
    for _ in 0..RANDOM_DRAWS {
        let geom = random_geometry(&mut rng);
        let theta = random_angle(&mut rng);
        let vn = random_noise_subspace(&mut rng, geom.len());
        let f = |t: f64| null_spectrum(&geom, 1.0, t, &vn);
        let h1 = 1e-5;
        let fd1 = (f(theta + h1) - f(theta - h1)) / (2.0 * h1);
        let h2 = 1e-4;
        let fd2 = (f(theta + h2) - 2.0 * f(theta) + f(theta - h2)) / (h2 * h2);
        worst1 = worst1.max(rel_err(f1(&geom, theta, &vn), fd1, 1.0));
        worst2 = worst2.max(rel_err(f2(&geom, theta, &vn), fd2, 1.0));
    }
    report(
        "C2 derivative fidelity",
        worst1 <= 1e-4 && worst2 <= 1e-3,
        format!("worst relative error f1 {worst1:.2e} (limit 1e-4), f2 {worst2:.2e} (limit 1e-3)"),
    );
}

#[test]
fn c3_perturbation_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_rel: f64 = 0.0;
    let mut worst_exact: f64 = 0.0;
    for _ in 0..RANDOM_DRAWS {
        let geom = random_geometry(&mut rng);
        let theta = random_angle(&mut rng);
        let vn = random_noise_subspace(&mut rng, geom.len());
        let composed = delta_theta(&geom, theta, &vn).delta_theta.unwrap();
        let expanded = delta_theta_expanded(&geom, theta, &vn).unwrap();
        worst_rel = worst_rel.max(rel_err(expanded, composed, f64::MIN_POSITIVE));

        let exact = exact_noise_subspace(&geom, &[theta], 0.0);
        worst_exact = worst_exact.max(delta_theta(&geom, theta, &exact).delta_theta.unwrap().abs());
    }
    report(
        "C3 perturbation consistency",
        worst_rel <= 1e-12 && worst_exact <= 1e-9,
        format!("expanded vs composed {worst_rel:.2e} (limit 1e-12), |Δθ| at exact Vn {worst_exact:.2e} (limit 1e-9)"),
    );
}

#[test]
fn c4_table1_magnitude() {
    let run = table1();
    let low = TABLE1_SIM_LOW_DEG / TABLE1_FACTOR;
    let high = TABLE1_SIM_HIGH_DEG * TABLE1_FACTOR;
    let snrs = &run.results.config.snr_db_list;
    let sims: Vec<f64> = (0..snrs.len())
        .map(|s| run.results.cell(0, s).rmse(RmseMode::Paper).sim.to_degrees())
        .collect();
    let in_band = sims.iter().all(|&v| (low..=high).contains(&v));
    let fast = run.elapsed <= SWEEP_TIME_LIMIT;
    let cells: Vec<String> = snrs.iter().zip(&sims).map(|(s, v)| format!("{s} dB: {v:.4e}")).collect();
    let geom = ArrayGeometry::uniform_linear(11, 10).unwrap();
    let trials = run.results.config.trials as f64;
    let floor: Vec<String> = snrs
        .iter()
        .map(|&s| {
            let crb = crb_std(&geom, 60f64.to_radians(), s, run.results.config.snapshots);
            format!("{:.4e}", (crb * trials.sqrt()).to_degrees())
        })
        .collect();
    report(
        "C4 Table 1 magnitude",
        in_band && fast,
        format!(
            "uniform M=11 paper-mode sim RMSE (deg) [{}], band [{low:.4e}, {high:.4e}], CRB paper-mode floor [{}]; sweep took {:.1}s (limit {}s)",
            cells.join(", "),
            floor.join(", "),
            run.elapsed.as_secs_f64(),
            SWEEP_TIME_LIMIT.as_secs()
        ),
    );
}

#[test]
fn c5_theory_tracks_simulation() {
    let res = &table1().results;
    let n_snr = res.config.snr_db_list.len();
    let mut worst_spread: f64 = 1.0;
    let mut all = Vec::new();
    for g in 0..res.config.geometries.len() {
        let ratios: Vec<f64> = (0..n_snr)
            .map(|s| {
                let r = res.cell(g, s).rmse(RmseMode::Paper);
                r.sim / r.theory
            })
            .collect();
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        worst_spread = worst_spread.max(max / min);
        all.extend(ratios);
    }
    let mean = all.iter().sum::<f64>() / all.len() as f64;
    report(
        "C5 theory/simulation tracking",
        worst_spread < 3.0,
        format!("sim/theory spread across SNR {worst_spread:.3} (limit 3); mean sim/theory ratio {mean:.3}"),
    );
}

#[test]
fn c6_equal_length_comparison() {
    let res = &table1().results;
    let n_snr = res.config.snr_db_list.len();
    let mut ratios = Vec::new();
    for g in 1..res.config.geometries.len() {
        for s in 0..n_snr {
            let other = res.cell(g, s).rmse(RmseMode::Paper).sim;
            let uniform = res.cell(0, s).rmse(RmseMode::Paper).sim;
            ratios.push(other / uniform);
        }
    }
    let ok = ratios.iter().all(|&r| (0.5..=2.0).contains(&r));
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    report(
        "C6 equal-length comparison",
        ok,
        format!("non-uniform/uniform sim RMSE ratios [{}] (band [0.5, 2])", shown.join(", ")),
    );
}

#[test]
fn c7_determinism() {
    let first = csv_bytes(&table1().results);
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let second = csv_bytes(&single.install(|| run_experiment(&ExperimentConfig::table1())).unwrap());
    let third = csv_bytes(&four.install(|| run_experiment(&ExperimentConfig::table1())).unwrap());
    report(
        "C7 determinism",
        first == second && second == third,
        format!("{} CSV bytes; default, 1-thread and 4-thread runs identical: {}", first.len(), first == second && second == third),
    );
}

#[test]
fn c8_subspace_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut recon: f64 = 0.0;
    let mut noise_eq: f64 = 0.0;
    let mut ortho: f64 = 0.0;
    for _ in 0..RANDOM_DRAWS {
        let n = rand::Rng::random_range(&mut rng, 2..16);
        let r = random_hermitian(&mut rng, n);
        let dec = eigendecompose_hermitian(&r).unwrap();
        recon = recon.max((dec.reconstruct() - r.matrix()).camax() / r.matrix().camax());

        let geom = random_geometry(&mut rng);
        let theta = random_angle(&mut rng);
        let scen = SourceScenario::single(theta, 0.0, 1, 0);
        let dec = eigendecompose_hermitian(&analytic_covariance(&geom, &scen).unwrap()).unwrap();
        for &e in &dec.eigenvalues()[1..] {
            noise_eq = noise_eq.max(rel_err(e, 1.0, f64::MIN_POSITIVE));
        }

        let clean = exact_noise_subspace(&geom, &[theta], f64::INFINITY);
        ortho = ortho.max(clean.coordinates(&geom.steering_vector(theta, 1.0)).norm());
    }
    report(
        "C8 subspace invariants",
        recon <= 1e-9 && noise_eq <= 1e-9 && ortho <= 1e-8,
        format!("reconstruction {recon:.2e} (1e-9), noise eigenvalues {noise_eq:.2e} (1e-9), ‖Vnᴴa‖ {ortho:.2e} (1e-8)"),
    );
}
