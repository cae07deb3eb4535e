//! Narrowband snapshot model `x(t) = A(θ)·s(t) + n(t)` and covariance estimates.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::rng;

/// Sources impinging on an array, plus the noise and sampling setup.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceScenario {
    /// Directions of arrival in radians, each in `(0, π)`.
    pub doas: Vec<f64>,
    /// Per-source power over per-sensor noise power. `f64::INFINITY` disables noise.
    pub snr_db: f64,
    pub snapshots: usize,
    /// Carrier wavelength in the geometry's units (1.0 when positions are in wavelengths).
    pub wavelength: f64,
    pub seed: u64,
}

impl SourceScenario {
    pub fn single(doa: f64, snr_db: f64, snapshots: usize, seed: u64) -> Self {
        Self {
            doas: vec![doa],
            snr_db,
            snapshots,
            wavelength: 1.0,
            seed,
        }
    }

    /// Noise power σ² per sensor, relative to unit source power.
    pub fn noise_power(&self) -> f64 {
        10f64.powf(-self.snr_db / 10.0)
    }

    pub fn validate(&self, geom: &ArrayGeometry) -> Result<()> {
        let d = self.doas.len();
        if d == 0 || d >= geom.len() {
            return Err(Error::SourceCount { sources: d, sensors: geom.len() });
        }
        if self.snapshots == 0 {
            return Err(Error::Scenario("at least one snapshot is required".into()));
        }
        if !(self.wavelength.is_finite() && self.wavelength > 0.0) {
            return Err(Error::Scenario(format!("wavelength must be positive, got {}", self.wavelength)));
        }
        if self.snr_db.is_nan() {
            return Err(Error::Scenario("SNR is NaN".into()));
        }
        for (i, &theta) in self.doas.iter().enumerate() {
            if !(theta > 0.0 && theta < std::f64::consts::PI) {
                return Err(Error::Scenario(format!("DOA {theta} rad outside (0, π)")));
            }
            if self.doas[..i].contains(&theta) {
                return Err(Error::Scenario(format!("duplicate DOA {theta} rad")));
            }
        }
        Ok(())
    }

    /// The `M × D` matrix of steering vectors.
    pub fn steering_matrix(&self, geom: &ArrayGeometry) -> DMatrix<Complex64> {
        let columns: Vec<DVector<Complex64>> = self
            .doas
            .iter()
            .map(|&theta| geom.steering_vector(theta, self.wavelength))
            .collect();
        DMatrix::from_columns(&columns)
    }
}

/// `M × N` block of array snapshots; column `t` is `x(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMatrix(DMatrix<Complex64>);

impl SnapshotMatrix {
    pub fn from_matrix(data: DMatrix<Complex64>) -> Self {
        Self(data)
    }

    pub fn data(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn sensors(&self) -> usize {
        self.0.nrows()
    }

    pub fn snapshots(&self) -> usize {
        self.0.ncols()
    }
}

/// Hermitian positive semidefinite `M × M` covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix(DMatrix<Complex64>);

impl CovarianceMatrix {
    /// Wrap a square matrix, replacing it by its Hermitian part `(R + Rᴴ)/2`.
    pub fn from_hermitian(r: DMatrix<Complex64>) -> Result<Self> {
        if r.nrows() != r.ncols() {
            return Err(Error::Scenario(format!(
                "covariance must be square, got {}x{}",
                r.nrows(),
                r.ncols()
            )));
        }
        Ok(Self(hermitian_part(r)))
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

fn hermitian_part(r: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let rh = r.adjoint();
    (r + rh).scale(0.5)
}

fn circular_gaussian<R: Rng>(rng: &mut R, std_per_component: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * std_per_component, im * std_per_component)
}

/// Draw `N` snapshots from unit-power circular Gaussian sources in white
/// circular Gaussian noise.
///
/// For a given seed the source symbols do not depend on the SNR, so runs
/// that differ only in SNR share the same signal component.
pub fn generate_snapshots(geom: &ArrayGeometry, scen: &SourceScenario) -> Result<SnapshotMatrix> {
    scen.validate(geom)?;
    let a = scen.steering_matrix(geom);
    let (m, d, n) = (geom.len(), scen.doas.len(), scen.snapshots);
    let noise_std = (scen.noise_power() / 2.0).sqrt();
    let source_std = (0.5f64).sqrt();

    let mut rng = rng::stream(scen.seed);
    let mut x = DMatrix::<Complex64>::zeros(m, n);
    let mut s = DVector::<Complex64>::zeros(d);
    for t in 0..n {
        for k in 0..d {
            s[k] = circular_gaussian(&mut rng, source_std);
        }
        let mut column = &a * &s;
        for i in 0..m {
            column[i] += circular_gaussian(&mut rng, noise_std);
        }
        x.set_column(t, &column);
    }
    Ok(SnapshotMatrix(x))
}

/// `R = (1/N)·Σ x(t)·x(t)ᴴ`, made exactly Hermitian.
pub fn sample_covariance(x: &SnapshotMatrix) -> CovarianceMatrix {
    let data = x.data();
    let n = data.ncols().max(1) as f64;
    let r = (data * data.adjoint()).unscale(n);
    CovarianceMatrix(hermitian_part(r))
}

/// Exact covariance `A·Aᴴ + σ²·I` for unit-power uncorrelated sources.
pub fn analytic_covariance(geom: &ArrayGeometry, scen: &SourceScenario) -> Result<CovarianceMatrix> {
    scen.validate(geom)?;
    let a = scen.steering_matrix(geom);
    let noise = scen.noise_power();
    let mut r = &a * a.adjoint();
    for i in 0..r.nrows() {
        r[(i, i)] += Complex64::new(noise, 0.0);
    }
    Ok(CovarianceMatrix(hermitian_part(r)))
}
