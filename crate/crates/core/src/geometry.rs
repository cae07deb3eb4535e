//! Linear and planar sensor layouts, steering vectors and their angular
//! derivatives.
//!
//! All coordinates are in wavelength units. A steering vector element for a
//! sensor at `(p, q)` is `exp(j·(2π/λ)·(p·cos θ + q·sin θ))`, so for a linear
//! array on the x-axis the phase is proportional to `p·cos θ` and the search
//! sector is `(0, π)`.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `Σ spacings == array_length`.
pub const LENGTH_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensor {
    pub p: f64,
    pub q: f64,
}

impl Sensor {
    pub fn linear(p: f64) -> Self {
        Self { p, q: 0.0 }
    }
}

/// How consecutive spacings grow along a non-uniform linear array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Progression {
    /// Spacings grow by a constant increment; `growth` is the last/first spacing ratio.
    Arithmetic,
    /// Spacings grow by a constant ratio `growth`.
    Geometric,
}

impl Progression {
    pub fn name(self) -> &'static str {
        match self {
            Progression::Arithmetic => "arithmetic",
            Progression::Geometric => "geometric",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    /// Half-wavelength uniform linear array.
    Uniform,
    Progressive { progression: Progression, growth: f64 },
    /// Arbitrary sensor coordinates in the plane.
    Planar,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Uniform => "uniform",
            Scheme::Progressive { progression, .. } => progression.name(),
            Scheme::Planar => "planar",
        }
    }

    pub fn growth(&self) -> Option<f64> {
        match self {
            Scheme::Progressive { growth, .. } => Some(*growth),
            _ => None,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Progressive { progression, growth } => {
                write!(f, "{}(growth={})", progression.name(), growth)
            }
            other => f.write_str(other.name()),
        }
    }
}

/// Immutable sensor layout. The first sensor is always at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    sensors: Vec<Sensor>,
    array_length: f64,
    scheme: Scheme,
}

impl ArrayGeometry {
    /// Uniform linear array with half-wavelength spacing.
    ///
    /// The array length is tied to the sensor count, so `half_wavelength_spacings`
    /// must equal `sensors - 1`.
    pub fn uniform_linear(sensors: usize, half_wavelength_spacings: usize) -> Result<Self> {
        if sensors < 2 {
            return Err(Error::Geometry(format!("need at least 2 sensors, got {sensors}")));
        }
        if half_wavelength_spacings != sensors - 1 {
            return Err(Error::Geometry(format!(
                "a uniform half-wavelength array of {sensors} sensors spans {} half-wavelengths, not {half_wavelength_spacings}",
                sensors - 1
            )));
        }
        let sensors_v = (0..sensors).map(|m| Sensor::linear(0.5 * m as f64)).collect();
        Ok(Self {
            sensors: sensors_v,
            array_length: 0.5 * (sensors - 1) as f64,
            scheme: Scheme::Uniform,
        })
    }

    /// Linear array whose consecutive spacings grow progressively, rescaled so
    /// the spacings sum to `array_length` (in wavelengths).
    ///
    /// `growth = 1` gives equal spacing.
    pub fn nonuniform_progressive(
        sensors: usize,
        array_length: f64,
        progression: Progression,
        growth: f64,
    ) -> Result<Self> {
        if sensors < 2 {
            return Err(Error::Geometry(format!("need at least 2 sensors, got {sensors}")));
        }
        if !(array_length.is_finite() && array_length > 0.0) {
            return Err(Error::Geometry(format!("array length must be positive, got {array_length}")));
        }
        if !growth.is_finite() || growth < 1.0 {
            return Err(Error::Geometry(format!(
                "growth must be >= 1 (spacings may not shrink), got {growth}"
            )));
        }
        let gaps = sensors - 1;
        let raw: Vec<f64> = match progression {
            Progression::Geometric => (0..gaps).map(|k| growth.powi(k as i32)).collect(),
            Progression::Arithmetic if gaps == 1 => vec![1.0],
            Progression::Arithmetic => (0..gaps)
                .map(|k| 1.0 + (growth - 1.0) * k as f64 / (gaps - 1) as f64)
                .collect(),
        };
        let total: f64 = raw.iter().sum();
        let scale = array_length / total;

        let mut positions = Vec::with_capacity(sensors);
        positions.push(Sensor::linear(0.0));
        let mut p = 0.0;
        for d in &raw[..gaps - 1] {
            p += d * scale;
            positions.push(Sensor::linear(p));
        }
        // Pin the last sensor so the length is exact.
        positions.push(Sensor::linear(array_length));

        let geom = Self {
            sensors: positions,
            array_length,
            scheme: Scheme::Progressive { progression, growth },
        };
        geom.check_linear()?;
        Ok(geom)
    }

    /// Arbitrary planar layout. Coordinates are translated so the first sensor
    /// sits at the origin.
    pub fn planar(sensors: Vec<Sensor>) -> Result<Self> {
        if sensors.len() < 2 {
            return Err(Error::Geometry(format!(
                "need at least 2 sensors, got {}",
                sensors.len()
            )));
        }
        if sensors.iter().any(|s| !s.p.is_finite() || !s.q.is_finite()) {
            return Err(Error::Geometry("non-finite sensor coordinate".into()));
        }
        let origin = sensors[0];
        let sensors: Vec<Sensor> = sensors
            .iter()
            .map(|s| Sensor { p: s.p - origin.p, q: s.q - origin.q })
            .collect();
        let last = sensors[sensors.len() - 1];
        Ok(Self {
            array_length: last.p.hypot(last.q),
            sensors,
            scheme: Scheme::Planar,
        })
    }

    fn check_linear(&self) -> Result<()> {
        let spacings = self.spacings();
        if spacings.iter().any(|&d| d <= 0.0) {
            return Err(Error::Geometry("sensor positions must be strictly increasing".into()));
        }
        let strict = matches!(self.scheme, Scheme::Progressive { growth, .. } if growth > 1.0);
        for w in spacings.windows(2) {
            if w[1] < w[0] - LENGTH_TOLERANCE || (strict && w[1] <= w[0]) {
                return Err(Error::Geometry(format!(
                    "spacings must increase progressively; {} followed by {}",
                    w[0], w[1]
                )));
            }
        }
        let sum: f64 = spacings.iter().sum();
        if (sum - self.array_length).abs() > LENGTH_TOLERANCE {
            return Err(Error::Geometry(format!(
                "spacings sum to {sum}, expected {}",
                self.array_length
            )));
        }
        Ok(())
    }

    pub fn sensors(&self) -> &[Sensor] {
        &self.sensors
    }

    pub fn len(&self) -> usize {
        self.sensors.len()
    }

    /// Always false; a geometry holds at least two sensors.
    pub fn is_empty(&self) -> bool {
        self.sensors.is_empty()
    }

    /// Distance between the first and last sensor, in wavelengths.
    pub fn array_length(&self) -> f64 {
        self.array_length
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Consecutive spacings `p[k+1] - p[k]` along the x-axis.
    pub fn spacings(&self) -> Vec<f64> {
        self.sensors.windows(2).map(|w| w[1].p - w[0].p).collect()
    }

    /// Steering vector towards `theta` (radians).
    pub fn steering_vector(&self, theta: f64, wavelength: f64) -> DVector<Complex64> {
        let k = 2.0 * PI / wavelength;
        let (sin, cos) = theta.sin_cos();
        DVector::from_iterator(
            self.len(),
            self.sensors
                .iter()
                .map(|s| Complex64::cis(k * (s.p * cos + s.q * sin))),
        )
    }

    /// First (`order = 1`) or second (`order = 2`) derivative of the steering
    /// vector with respect to `theta`.
    pub fn steering_derivative(
        &self,
        theta: f64,
        wavelength: f64,
        order: u8,
    ) -> Result<DVector<Complex64>> {
        let derivs = self.steering_with_derivatives(theta, wavelength);
        match order {
            1 => Ok(derivs.first),
            2 => Ok(derivs.second),
            other => Err(Error::DerivativeOrder(other)),
        }
    }

    /// Steering vector together with its first two angular derivatives,
    /// sharing one phase evaluation.
    pub fn steering_with_derivatives(&self, theta: f64, wavelength: f64) -> SteeringDerivatives {
        let k = 2.0 * PI / wavelength;
        let (sin, cos) = theta.sin_cos();
        let m = self.len();
        let mut value = DVector::zeros(m);
        let mut first = DVector::zeros(m);
        let mut second = DVector::zeros(m);
        for (i, s) in self.sensors.iter().enumerate() {
            let a = Complex64::cis(k * (s.p * cos + s.q * sin));
            let dphase = k * (-s.p * sin + s.q * cos);
            let d2phase = k * (-s.p * cos - s.q * sin);
            value[i] = a;
            first[i] = Complex64::new(0.0, dphase) * a;
            second[i] = Complex64::new(-dphase * dphase, d2phase) * a;
        }
        SteeringDerivatives { value, first, second }
    }
}

/// `a(θ)`, `∂a/∂θ` and `∂²a/∂θ²` at one angle.
#[derive(Debug, Clone)]
pub struct SteeringDerivatives {
    pub value: DVector<Complex64>,
    pub first: DVector<Complex64>,
    pub second: DVector<Complex64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn positions(g: &ArrayGeometry) -> Vec<f64> {
        g.sensors().iter().map(|s| s.p).collect()
    }

    #[test]
    fn uniform_eleven_sensors() {
        let g = ArrayGeometry::uniform_linear(11, 10).unwrap();
        let p = positions(&g);
        assert_eq!(p.len(), 11);
        for (m, pm) in p.iter().enumerate() {
            assert_eq!(*pm, 0.5 * m as f64);
        }
        assert_eq!(g.array_length(), 5.0);
        assert_eq!(g.scheme(), Scheme::Uniform);
    }

    #[test]
    fn uniform_minimal_and_twelve() {
        assert_eq!(positions(&ArrayGeometry::uniform_linear(2, 1).unwrap()), vec![0.0, 0.5]);
        let g = ArrayGeometry::uniform_linear(12, 11).unwrap();
        assert_eq!(*positions(&g).last().unwrap(), 5.5);
    }

    #[test]
    fn uniform_rejects_length_mismatch() {
        let err = ArrayGeometry::uniform_linear(11, 9).unwrap_err();
        assert!(err.to_string().contains("10 half-wavelengths"), "{err}");
        assert!(ArrayGeometry::uniform_linear(1, 0).is_err());
    }

    #[test]
    fn geometric_growth_one_is_uniform() {
        let g = ArrayGeometry::nonuniform_progressive(5, 5.0, Progression::Geometric, 1.0).unwrap();
        for d in g.spacings() {
            assert_relative_eq!(d, 1.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn geometric_ratio_two_three_sensors() {
        let g = ArrayGeometry::nonuniform_progressive(3, 3.0, Progression::Geometric, 2.0).unwrap();
        let p = positions(&g);
        assert_relative_eq!(p[1], 1.0, epsilon = 1e-12);
        assert_eq!(p[2], 3.0);
    }

    #[test]
    fn geometric_ratio_one_point_five() {
        let g = ArrayGeometry::nonuniform_progressive(5, 5.0, Progression::Geometric, 1.5).unwrap();
        let d1 = 5.0 / (1.0 + 1.5 + 2.25 + 3.375);
        let expected = [d1, d1 * 1.5, d1 * 2.25, d1 * 3.375];
        for (d, e) in g.spacings().iter().zip(expected) {
            assert_relative_eq!(*d, e, epsilon = 1e-12);
        }
        let sum: f64 = g.spacings().iter().sum();
        assert!((sum - 5.0).abs() <= 1e-12);
    }

    #[test]
    fn arithmetic_endpoints_ratio() {
        let g = ArrayGeometry::nonuniform_progressive(6, 4.0, Progression::Arithmetic, 3.0).unwrap();
        let d = g.spacings();
        assert_relative_eq!(d[4] / d[0], 3.0, epsilon = 1e-12);
        let steps: Vec<f64> = d.windows(2).map(|w| w[1] - w[0]).collect();
        for s in &steps {
            assert_relative_eq!(*s, steps[0], epsilon = 1e-12);
        }
    }

    #[test]
    fn progressive_rejects_shrinking_growth() {
        assert!(ArrayGeometry::nonuniform_progressive(5, 5.0, Progression::Geometric, 0.9).is_err());
        assert!(ArrayGeometry::nonuniform_progressive(5, 0.0, Progression::Geometric, 1.2).is_err());
        assert!(ArrayGeometry::nonuniform_progressive(1, 5.0, Progression::Geometric, 1.2).is_err());
    }

    #[test]
    fn steering_examples() {
        let g = ArrayGeometry::uniform_linear(3, 2).unwrap();
        let a = g.steering_vector(60f64.to_radians(), 1.0);
        assert_eq!(a[0], Complex64::new(1.0, 0.0));
        assert!((a[1] - Complex64::i()).norm() < 1e-12);
        assert!((a[2] + 1.0).norm() < 1e-12);

        let a = g.steering_vector(90f64.to_radians(), 1.0);
        for e in a.iter() {
            assert!((e - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn derivative_examples() {
        let g = ArrayGeometry::uniform_linear(3, 2).unwrap();
        let d = g.steering_derivative(90f64.to_radians(), 1.0, 1).unwrap();
        assert_eq!(d[0], Complex64::new(0.0, 0.0));
        assert!((d[1] - Complex64::new(0.0, -PI)).norm() < 1e-12);
        assert!((d[2] - Complex64::new(0.0, -2.0 * PI)).norm() < 1e-12);
        assert!(matches!(
            g.steering_derivative(0.3, 1.0, 3),
            Err(Error::DerivativeOrder(3))
        ));
        assert!(g.steering_derivative(0.3, 1.0, 0).is_err());
    }

    #[test]
    fn planar_translates_to_origin() {
        let g = ArrayGeometry::planar(vec![
            Sensor { p: 1.0, q: 1.0 },
            Sensor { p: 2.0, q: 1.0 },
            Sensor { p: 4.0, q: 5.0 },
        ])
        .unwrap();
        assert_eq!(g.sensors()[0], Sensor { p: 0.0, q: 0.0 });
        assert_relative_eq!(g.array_length(), 5.0);
        let a = g.steering_vector(1.1, 1.0);
        assert_eq!(a[0], Complex64::new(1.0, 0.0));
    }

    fn arb_geometry() -> impl Strategy<Value = ArrayGeometry> {
        prop_oneof![
            (2usize..16).prop_map(|m| ArrayGeometry::uniform_linear(m, m - 1).unwrap()),
            (2usize..16, 0.5f64..10.0, 1.0f64..2.0, any::<bool>()).prop_map(|(m, len, g, geo)| {
                let prog = if geo { Progression::Geometric } else { Progression::Arithmetic };
                ArrayGeometry::nonuniform_progressive(m, len, prog, g).unwrap()
            }),
            prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 2..10).prop_map(|pts| {
                ArrayGeometry::planar(pts.into_iter().map(|(p, q)| Sensor { p, q }).collect())
                    .unwrap()
            }),
        ]
    }

    fn rel_err(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-3)
    }

    proptest! {
        #[test]
        fn unit_modulus(g in arb_geometry(), theta in 0.01f64..3.13) {
            for e in g.steering_vector(theta, 1.0).iter() {
                prop_assert!((e.norm() - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn derivatives_match_central_differences(g in arb_geometry(), theta in 0.05f64..3.09) {
            let h = 1e-6;
            let plus = g.steering_vector(theta + h, 1.0);
            let minus = g.steering_vector(theta - h, 1.0);
            let d1 = g.steering_derivative(theta, 1.0, 1).unwrap();
            for i in 0..g.len() {
                let fd = (plus[i] - minus[i]) / (2.0 * h);
                prop_assert!(rel_err(d1[i], fd) <= 1e-5, "order 1 element {}: {} vs {}", i, d1[i], fd);
            }
            // Second differences lose accuracy to rounding at h = 1e-6, so use a
            // larger step and compare vector norms.
            let h2 = 1e-4;
            let mid = g.steering_vector(theta, 1.0);
            let plus = g.steering_vector(theta + h2, 1.0);
            let minus = g.steering_vector(theta - h2, 1.0);
            let fd = (plus - mid * Complex64::new(2.0, 0.0) + minus) / Complex64::new(h2 * h2, 0.0);
            let d2 = g.steering_derivative(theta, 1.0, 2).unwrap();
            let err = (&d2 - &fd).norm() / d2.norm().max(1e-3);
            prop_assert!(err <= 1e-5, "order 2 relative error {}", err);
        }

        #[test]
        fn uniform_equals_degenerate_geometric(m in 2usize..20) {
            let u = ArrayGeometry::uniform_linear(m, m - 1).unwrap();
            let g = ArrayGeometry::nonuniform_progressive(m, (m - 1) as f64 / 2.0, Progression::Geometric, 1.0).unwrap();
            for (a, b) in u.sensors().iter().zip(g.sensors()) {
                prop_assert!((a.p - b.p).abs() <= 1e-12);
                prop_assert_eq!(a.q, b.q);
            }
        }

        #[test]
        fn spacings_sum_to_length(m in 2usize..30, len in 0.1f64..50.0, growth in 1.0f64..3.0, geo in any::<bool>()) {
            let prog = if geo { Progression::Geometric } else { Progression::Arithmetic };
            let g = ArrayGeometry::nonuniform_progressive(m, len, prog, growth).unwrap();
            let sum: f64 = g.spacings().iter().sum();
            prop_assert!((sum - g.array_length()).abs() <= LENGTH_TOLERANCE);
            prop_assert_eq!(g.sensors().last().unwrap().p - g.sensors()[0].p, len);
            for w in g.spacings().windows(2) {
                prop_assert!(w[1] >= w[0]);
            }
        }
    }
}
