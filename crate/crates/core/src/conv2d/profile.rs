use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::FrequencyGrid;
use crate::trial::TrialFunction;

/// Default number of sample intervals on [0, R].
pub const PROFILE_SAMPLES: usize = 4096;

/// Real radial profile f(|y|) sampled uniformly on [0, R], zero beyond R.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub radius: f64,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    /// Trapezoid weights for ∫_{R²} g(|y|) dy = Σ w_k g(r_k).
    pub weights: Vec<f64>,
    l2_norm: f64,
}

impl RadialProfile {
    pub fn from_samples(radius: f64, values: Vec<f64>) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("radius", format!("must be finite and positive, got {radius}")));
        }
        if values.len() < 4 || values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values", "need at least four finite samples"));
        }
        let n = values.len() - 1;
        let h = radius / n as f64;
        let nodes: Vec<f64> = (0..=n).map(|k| k as f64 * h).collect();
        let weights: Vec<f64> = nodes
            .iter()
            .enumerate()
            .map(|(k, r)| match k {
                // Euler-Maclaurin end correction: (r g)'(0) = g(0)
                0 => 2.0 * PI * h * h / 12.0,
                _ if k == n => PI * r * h,
                _ => 2.0 * PI * r * h,
            })
            .collect();
        let l2_norm = weights
            .iter()
            .zip(&values)
            .map(|(w, v)| w * v * v)
            .sum::<f64>()
            .sqrt();
        Ok(Self {
            radius,
            nodes,
            values,
            weights,
            l2_norm,
        })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(radius: f64, samples: usize, f: F) -> Result<Self> {
        let n = samples.max(3);
        let values = (0..=n).map(|k| f(radius * k as f64 / n as f64)).collect();
        Self::from_samples(radius, values)
    }

    /// exp(-r²/(2w²)) on [0, 6w].
    pub fn gaussian(width: f64) -> Result<Self> {
        Self::from_fn(6.0 * width, PROFILE_SAMPLES, |r| (-r * r / (2.0 * width * width)).exp())
    }

    /// exp(-(r-r0)²/(2w²)) on [0, r0 + 6w].
    pub fn annulus(r0: f64, width: f64) -> Result<Self> {
        Self::from_fn(r0 + 6.0 * width, PROFILE_SAMPLES, |r| {
            (-(r - r0).powi(2) / (2.0 * width * width)).exp()
        })
    }

    /// exp(-(r/s)^α) on [0, s·(20)^{1/α}].
    pub fn exp_power(alpha: f64, scale: f64) -> Result<Self> {
        Self::from_fn(scale * 20f64.powf(1.0 / alpha), PROFILE_SAMPLES, |r| (-(r / scale).powf(alpha)).exp())
    }

    /// ‖f‖_{L²(R²)} of the induced radial function.
    pub fn l2_norm(&self) -> f64 {
        self.l2_norm
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out.l2_norm *= c.abs();
        out
    }

    /// r ↦ f(r/s) on [0, sR], resampled on the same number of nodes.
    pub fn dilated(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(invalid("dilation", format!("must be finite and positive, got {s}")));
        }
        Self::from_fn(self.radius * s, self.values.len() - 1, |r| self.eval(r / s))
    }

    /// Cubic (Catmull-Rom) interpolation, even across r = 0.
    pub fn eval(&self, r: f64) -> f64 {
        if !(r >= 0.0) || r > self.radius {
            return 0.0;
        }
        let n = self.values.len() - 1;
        let h = self.radius / n as f64;
        let x = r / h;
        let k = (x.floor() as usize).min(n - 1);
        let t = x - k as f64;
        let at = |i: isize| -> f64 {
            let j = i.unsigned_abs();
            if j > n {
                0.0
            } else {
                self.values[j]
            }
        };
        let k = k as isize;
        let (p0, p1, p2, p3) = (at(k - 1), at(k), at(k + 1), at(k + 2));
        0.5 * (2.0 * p1
            + (-p0 + p2) * t
            + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t * t
            + (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t * t * t)
    }

    /// The radial function as a frequency-side trial function f̂(ξ) = f(|ξ|).
    pub fn to_trial(&self, grid: FrequencyGrid) -> Result<TrialFunction> {
        if grid.d != 2 {
            return Err(crate::Error::DimensionMismatch {
                expected: 2,
                found: grid.d,
            });
        }
        if self.radius > grid.xi_max * std::f64::consts::SQRT_2 {
            return Err(invalid("radius", "profile does not fit in the frequency box"));
        }
        TrialFunction::from_fn(grid, |p| Complex64::new(self.eval(p[0].hypot(p[1])), 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_norm() {
        // ∫ e^{-r²/w²} dy = π w²
        let p = RadialProfile::gaussian(1.5).unwrap();
        assert!((p.l2_norm() - (PI * 1.5 * 1.5).sqrt()).abs() < 1e-7);
        assert!((p.scaled(2.0).l2_norm() - 2.0 * p.l2_norm()).abs() < 1e-14);
    }

    #[test]
    fn interpolation_accuracy() {
        // the annulus has a kink at 0 once extended evenly, so stay off the first cells
        let p = RadialProfile::annulus(2.0, 0.5).unwrap();
        for i in 0..1000 {
            let r = 4.9 * i as f64 / 1000.0 + 1e-2;
            let e = (-(r - 2.0f64).powi(2) / 0.5).exp();
            assert!((p.eval(r) - e).abs() < 1e-9, "{r} {} {e}", p.eval(r));
        }
        let g = RadialProfile::gaussian(1.0).unwrap();
        for i in 0..100 {
            let r = 1e-2 * i as f64 / 100.0;
            assert!((g.eval(r) - (-0.5 * r * r).exp()).abs() < 1e-10);
        }
        assert_eq!(p.eval(-1.0), 0.0);
        assert_eq!(p.eval(100.0), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RadialProfile::from_samples(0.0, vec![1.0; 8]).is_err());
        assert!(RadialProfile::from_samples(1.0, vec![1.0, f64::NAN, 1.0, 1.0]).is_err());
    }
}
