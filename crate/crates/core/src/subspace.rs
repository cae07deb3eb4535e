//! Covariance eigenstructure, noise subspace, and the MUSIC spectrum search.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::signal::CovarianceMatrix;

/// Lower clamp on the null spectrum before taking its reciprocal.
pub const NULL_FLOOR: f64 = 1e-30;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

/// Eigenpairs of a covariance, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct SubspaceDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl SubspaceDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Columns are unit eigenvectors paired with [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvectors `D+1 … M`, those paired with the `M − D` smallest eigenvalues.
    pub fn noise_subspace(&self, sources: usize) -> Result<NoiseSubspace> {
        let m = self.dim();
        if sources == 0 || sources >= m {
            return Err(Error::SourceCount { sources, sensors: m });
        }
        Ok(NoiseSubspace(self.eigenvectors.columns(sources, m - sources).into_owned()))
    }

    /// `Φ·Λ·Φᴴ`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let mut scaled = self.eigenvectors.clone();
        for (j, &e) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(e);
        }
        scaled * self.eigenvectors.adjoint()
    }
}

/// Orthonormal basis `Vn` (`M × (M − D)`) of the noise subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSubspace(DMatrix<Complex64>);

impl NoiseSubspace {
    /// Wrap a matrix whose columns are assumed orthonormal.
    pub fn from_matrix(vn: DMatrix<Complex64>) -> Self {
        Self(vn)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn sensors(&self) -> usize {
        self.0.nrows()
    }

    /// `Vn·Vnᴴ`.
    pub fn projector(&self) -> DMatrix<Complex64> {
        &self.0 * self.0.adjoint()
    }

    /// `Vnᴴ·v`.
    pub fn coordinates(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        self.0.ad_mul(v)
    }
}

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
pub fn eigendecompose_hermitian(r: &CovarianceMatrix) -> Result<SubspaceDecomposition> {
    let m = r.matrix();
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let eig = SymmetricEigen::try_new(m.clone(), EIGEN_EPS, EIGEN_MAX_ITER).ok_or(Error::NonFinite)?;

    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(Ordering::Equal)
    });
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let columns: Vec<_> = order.iter().map(|&i| eig.eigenvectors.column(i)).collect();
    Ok(SubspaceDecomposition {
        eigenvalues,
        eigenvectors: DMatrix::from_columns(&columns),
    })
}

/// Null spectrum `aᴴ(θ)·Vn·Vnᴴ·a(θ) = ‖Vnᴴ·a(θ)‖²`.
pub fn null_spectrum(geom: &ArrayGeometry, wavelength: f64, theta: f64, vn: &NoiseSubspace) -> f64 {
    let a = geom.steering_vector(theta, wavelength);
    vn.coordinates(&a).norm_squared()
}

/// Uniform angle grid `start, start + step, …` up to `stop` inclusive (radians).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        let g = Self { start, stop, step };
        g.validate()?;
        Ok(g)
    }

    /// The open sector `(0°, 180°)` sampled every `resolution_deg` degrees,
    /// starting one step in from each end.
    pub fn sector_degrees(resolution_deg: f64) -> Result<Self> {
        if !(resolution_deg > 0.0 && resolution_deg < 90.0) {
            return Err(Error::Grid(format!("resolution must be in (0, 90) degrees, got {resolution_deg}")));
        }
        Self::new(
            resolution_deg.to_radians(),
            (180.0 - resolution_deg).to_radians(),
            resolution_deg.to_radians(),
        )
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Grid(format!("step must be positive, got {}", self.step)));
        }
        if !(self.start > 0.0 && self.stop < std::f64::consts::PI && self.start <= self.stop) {
            return Err(Error::Grid(format!(
                "grid [{}, {}] must lie inside (0, π)",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    /// `floor((stop − start)/step) + 1`, tolerant of rounding in the ratio.
    pub fn len(&self) -> usize {
        ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn angle(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }
}

/// MUSIC pseudo-spectrum `ψ(θ)` sampled on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl SpectrumGrid {
    pub fn angle(&self, k: usize) -> f64 {
        self.grid.angle(k)
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|k| self.grid.angle(k))
    }

    /// Grid index of the global maximum (smallest angle on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = k;
            }
        }
        best
    }
}

/// `ψ(θ_k) = 1 / max(f(θ_k), NULL_FLOOR)` over the grid.
pub fn music_spectrum(
    geom: &ArrayGeometry,
    wavelength: f64,
    vn: &NoiseSubspace,
    grid: GridSpec,
) -> Result<SpectrumGrid> {
    grid.validate()?;
    if vn.sensors() != geom.len() {
        return Err(Error::Grid(format!(
            "noise subspace has {} rows but the array has {} sensors",
            vn.sensors(),
            geom.len()
        )));
    }
    let values = (0..grid.len())
        .into_par_iter()
        .map(|k| 1.0 / null_spectrum(geom, wavelength, grid.angle(k), vn).max(NULL_FLOOR))
        .collect();
    Ok(SpectrumGrid { grid, values })
}

/// Angles (ascending) of the `sources` largest strict interior local maxima.
/// Ties in height go to the smaller angle.
pub fn estimate_doa(spectrum: &SpectrumGrid, sources: usize) -> Result<Vec<f64>> {
    if sources == 0 {
        return Err(Error::SourceCount { sources, sensors: 0 });
    }
    let v = &spectrum.values;
    let mut peaks: Vec<usize> = (1..v.len().saturating_sub(1))
        .filter(|&k| v[k] > v[k - 1] && v[k] > v[k + 1])
        .collect();
    if peaks.len() < sources {
        return Err(Error::PeakDeficit { found: peaks.len(), wanted: sources });
    }
    // Stable sort keeps ascending index order among equal heights.
    peaks.sort_by(|&a, &b| v[b].partial_cmp(&v[a]).unwrap_or(Ordering::Equal));
    peaks.truncate(sources);
    peaks.sort_unstable();
    Ok(peaks.into_iter().map(|k| spectrum.angle(k)).collect())
}
