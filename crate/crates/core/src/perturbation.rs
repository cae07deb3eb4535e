//! First-order displacement of a null-spectrum minimum caused by an estimated
//! noise subspace.
//!
//! With `f(θ) = aᴴ(θ)·Vn·Vnᴴ·a(θ)` and its derivatives `f⁽¹⁾`, `f⁽²⁾`, the
//! perturbation of a direction estimate is `Δθ = −2·f⁽¹⁾(θ)/f⁽²⁾(θ)`, where
//!
//! * `f⁽¹⁾ = 2·Re{aᴴ·Vn·Vnᴴ·a′}`
//! * `f⁽²⁾ = 2·(T₂ + Re T₃)`, `T₂ = a′ᴴ·Vn·Vnᴴ·a′`, `T₃ = aᴴ·Vn·Vnᴴ·a″`.
//!
//! Everything here works in radians.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, SteeringDerivatives};
use crate::harness::{rmse, RmseMode};
use crate::rng::derive_seed;
use crate::signal::{generate_snapshots, sample_covariance, SourceScenario};
use crate::subspace::{eigendecompose_hermitian, NoiseSubspace};

/// Relative threshold below which `f⁽²⁾` is treated as zero.
pub const DEGENERATE_F2: f64 = 1e-12;

/// The three quadratic forms behind `f⁽¹⁾` and `f⁽²⁾`, evaluated through `Vnᴴ`.
#[derive(Debug, Clone, Copy)]
struct Terms {
    /// `aᴴ·P·a′`
    d2: num_complex::Complex64,
    /// `a′ᴴ·P·a′`
    t2: f64,
    /// `aᴴ·P·a″`
    t3: num_complex::Complex64,
    /// `a″ᴴ·P·a`
    t1: num_complex::Complex64,
}

fn terms(derivs: &SteeringDerivatives, vn: &NoiseSubspace) -> Terms {
    let c0 = vn.coordinates(&derivs.value);
    let c1 = vn.coordinates(&derivs.first);
    let c2 = vn.coordinates(&derivs.second);
    Terms {
        d2: c0.dotc(&c1),
        t2: c1.norm_squared(),
        t3: c0.dotc(&c2),
        t1: c2.dotc(&c0),
    }
}

fn derivatives(geom: &ArrayGeometry, theta: f64, vn: &NoiseSubspace) -> SteeringDerivatives {
    debug_assert_eq!(vn.sensors(), geom.len());
    geom.steering_with_derivatives(theta, 1.0)
}

/// `f⁽¹⁾(θ) = 2·Re{aᴴ(θ)·Vn·Vnᴴ·∂a/∂θ}`, the slope of the null spectrum.
pub fn f1(geom: &ArrayGeometry, theta: f64, vn: &NoiseSubspace) -> f64 {
    2.0 * terms(&derivatives(geom, theta, vn), vn).d2.re
}

/// `f⁽²⁾(θ) = 2·(T₂ + Re T₃)`, the curvature of the null spectrum.
pub fn f2(geom: &ArrayGeometry, theta: f64, vn: &NoiseSubspace) -> f64 {
    let t = terms(&derivatives(geom, theta, vn), vn);
    2.0 * (t.t2 + t.t3.re)
}

/// `f⁽²⁾` through the unsimplified sum `T₁ + 2·T₂ + T₃` (real part).
pub fn f2_three_term(geom: &ArrayGeometry, theta: f64, vn: &NoiseSubspace) -> f64 {
    let t = terms(&derivatives(geom, theta, vn), vn);
    (t.t1 + t.t3).re + 2.0 * t.t2
}

/// `f⁽¹⁾`, `f⁽²⁾` and `Δθ` at one angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationReport {
    pub theta: f64,
    pub f1: f64,
    pub f2: f64,
    /// `None` when `f⁽²⁾` is degenerate.
    pub delta_theta: Option<f64>,
}

impl PerturbationReport {
    pub fn degenerate(&self) -> bool {
        self.delta_theta.is_none()
    }

    /// `θ + Δθ`, the perturbed minimum.
    pub fn perturbed_theta(&self) -> Option<f64> {
        self.delta_theta.map(|d| self.theta + d)
    }
}

fn is_degenerate(f1: f64, f2: f64) -> bool {
    !f2.is_finite() || f2.abs() <= DEGENERATE_F2 * (1.0 + f1.abs())
}

/// `Δθ = −2·f⁽¹⁾/f⁽²⁾` at `theta`.
pub fn delta_theta(geom: &ArrayGeometry, theta: f64, vn: &NoiseSubspace) -> PerturbationReport {
    let t = terms(&derivatives(geom, theta, vn), vn);
    let f1 = 2.0 * t.d2.re;
    let f2 = 2.0 * (t.t2 + t.t3.re);
    PerturbationReport {
        theta,
        f1,
        f2,
        delta_theta: (!is_degenerate(f1, f2)).then(|| -2.0 * f1 / f2),
    }
}

/// `Δθ` from the expanded closed form
///
/// ```text
///        −2·Re{aᴴ·P·a′}
/// Δθ = ─────────────────────────
///       a′ᴴ·P·a′ + Re{aᴴ·P·a″}
/// ```
///
/// evaluated with the explicit projector `P = Vn·Vnᴴ`. Independent of
/// [`delta_theta`] apart from the steering derivatives.
pub fn delta_theta_expanded(geom: &ArrayGeometry, theta: f64, vn: &NoiseSubspace) -> Option<f64> {
    let d = derivatives(geom, theta, vn);
    let p = vn.projector();
    let pa = &p * &d.value;
    let pa1 = &p * &d.first;
    let numerator = -2.0 * d.value.dotc(&pa1).re;
    let denominator = d.first.dotc(&pa1).re + pa.dotc(&d.second).re;
    // numerator/denominator are f1 and f2/2 rescaled; same degeneracy rule
    if is_degenerate(-numerator, 2.0 * denominator) {
        None
    } else {
        Some(numerator / denominator)
    }
}

/// Root-mean-square of per-trial `Δθ` values, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryRmse {
    /// `sqrt(Σ Δθ²)` with no `1/L`.
    pub paper: f64,
    /// `sqrt(Σ Δθ² / L)`.
    pub standard: f64,
    pub included: usize,
    /// Trials dropped for a degenerate `f⁽²⁾`.
    pub excluded: usize,
}

/// Monte-Carlo estimate of the RMSE predicted by `Δθ`.
///
/// Each trial draws snapshots with seed `derive_seed(master_seed, [trial])`,
/// estimates the noise subspace from the sample covariance, and evaluates
/// `Δθ` at every true direction.
pub fn theoretical_rmse(
    geom: &ArrayGeometry,
    scen: &SourceScenario,
    trials: usize,
    master_seed: u64,
) -> Result<TheoryRmse> {
    if trials == 0 {
        return Err(Error::Scenario("at least one trial is required".into()));
    }
    scen.validate(geom)?;
    let per_trial: Vec<Option<Vec<f64>>> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Option<Vec<f64>>> {
            let trial = SourceScenario {
                seed: derive_seed(master_seed, &[t as u64]),
                ..scen.clone()
            };
            let r = sample_covariance(&generate_snapshots(geom, &trial)?);
            let vn = eigendecompose_hermitian(&r)?.noise_subspace(trial.doas.len())?;
            Ok(trial
                .doas
                .iter()
                .map(|&theta| delta_theta(geom, theta, &vn).delta_theta)
                .collect())
        })
        .collect::<Result<_>>()?;

    let excluded = per_trial.iter().filter(|t| t.is_none()).count();
    let errors: Vec<f64> = per_trial.into_iter().flatten().flatten().collect();
    if errors.is_empty() {
        return Ok(TheoryRmse { paper: f64::NAN, standard: f64::NAN, included: 0, excluded });
    }
    Ok(TheoryRmse {
        paper: rmse(&errors, RmseMode::Paper)?,
        standard: rmse(&errors, RmseMode::Standard)?,
        included: trials - excluded,
        excluded,
    })
}
