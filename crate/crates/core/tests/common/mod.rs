#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use doa_core::geometry::{ArrayGeometry, Progression, Sensor};
use doa_core::signal::{analytic_covariance, CovarianceMatrix, SourceScenario};
use doa_core::subspace::{eigendecompose_hermitian, NoiseSubspace};

pub fn random_complex<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
    })
}

/// `cols` orthonormal columns from the QR factor of a random matrix.
pub fn random_orthonormal<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<Complex64> {
    random_complex(rng, rows, cols).qr().q()
}

pub fn random_noise_subspace<R: Rng>(rng: &mut R, sensors: usize) -> NoiseSubspace {
    let cols = rng.random_range(1..sensors);
    NoiseSubspace::from_matrix(random_orthonormal(rng, sensors, cols))
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> CovarianceMatrix {
    let b = random_complex(rng, n, n);
    CovarianceMatrix::from_hermitian(&b + b.adjoint()).unwrap()
}

/// Uniform, arithmetic, geometric or planar layout with random parameters.
pub fn random_geometry<R: Rng>(rng: &mut R) -> ArrayGeometry {
    match rng.random_range(0..4) {
        0 => {
            let m = rng.random_range(3..14);
            ArrayGeometry::uniform_linear(m, m - 1).unwrap()
        }
        1 | 2 => {
            let m = rng.random_range(3..12);
            let length = rng.random_range(1.0..6.0);
            let growth = rng.random_range(1.0..2.0);
            let prog = if rng.random() { Progression::Geometric } else { Progression::Arithmetic };
            ArrayGeometry::nonuniform_progressive(m, length, prog, growth).unwrap()
        }
        _ => {
            let m = rng.random_range(3..10);
            let sensors = (0..m)
                .map(|_| Sensor { p: rng.random_range(-2.0..2.0), q: rng.random_range(-2.0..2.0) })
                .collect();
            ArrayGeometry::planar(sensors).unwrap()
        }
    }
}

pub fn random_angle<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(0.1..PI - 0.1)
}

/// Noise subspace of the exact covariance for `doas`.
pub fn exact_noise_subspace(geom: &ArrayGeometry, doas: &[f64], snr_db: f64) -> NoiseSubspace {
    let scen = SourceScenario {
        doas: doas.to_vec(),
        snr_db,
        snapshots: 1,
        wavelength: 1.0,
        seed: 0,
    };
    let r = analytic_covariance(geom, &scen).unwrap();
    eigendecompose_hermitian(&r).unwrap().noise_subspace(doas.len()).unwrap()
}

/// `|got − want| / max(|want|, floor)`.
pub fn rel_err(got: f64, want: f64, floor: f64) -> f64 {
    (got - want).abs() / want.abs().max(floor)
}
