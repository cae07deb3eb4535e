//! MUSIC direction-of-arrival estimation on planar sensor arrays, the
//! first-order DOA perturbation `Δθ = −2·f⁽¹⁾/f⁽²⁾`, and a seeded Monte-Carlo
//! harness comparing uniform and progressively spaced linear arrays of equal
//! length.
//!
//! ```
//! use doa_core::geometry::ArrayGeometry;
//! use doa_core::signal::{analytic_covariance, SourceScenario};
//! use doa_core::subspace::{eigendecompose_hermitian, estimate_doa, music_spectrum, GridSpec};
//!
//! let geom = ArrayGeometry::uniform_linear(11, 10).unwrap();
//! let scen = SourceScenario::single(60f64.to_radians(), f64::INFINITY, 1, 0);
//! let r = analytic_covariance(&geom, &scen).unwrap();
//! let vn = eigendecompose_hermitian(&r).unwrap().noise_subspace(1).unwrap();
//! let spectrum = music_spectrum(&geom, 1.0, &vn, GridSpec::sector_degrees(0.01).unwrap()).unwrap();
//! let doa = estimate_doa(&spectrum, 1).unwrap()[0];
//! assert!((doa.to_degrees() - 60.0).abs() <= 0.01);
//! ```

pub mod error;
pub mod geometry;
pub mod harness;
pub mod perturbation;
pub mod rng;
pub mod signal;
pub mod subspace;

pub use error::{Error, Result};
