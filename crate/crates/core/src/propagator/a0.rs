use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::resample::pullback;
use crate::trial::TrialFunction;

/// A0 = √(α/2)·P⊥ + √(α(α-1)/2)·P∥ with P∥ = ξ0ξ0ᵀ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct A0Transform {
    pub d: usize,
    pub xi0: [f64; 2],
    pub alpha: f64,
    pub matrix: [[f64; 2]; 2],
    pub inverse: [[f64; 2]; 2],
    pub det_abs: f64,
}

impl A0Transform {
    pub fn new(d: usize, xi0: &[f64], alpha: f64) -> Result<Self> {
        if xi0.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: xi0.len(),
            });
        }
        if !(alpha >= 2.0) {
            return Err(invalid("alpha", "must be >= 2"));
        }
        let z = [xi0[0], *xi0.get(1).unwrap_or(&0.0)];
        let r = z[0].hypot(z[1]);
        if (r - 1.0).abs() > 1e-12 {
            return Err(invalid("xi0", format!("must be a unit vector, |xi0| = {r}")));
        }
        let perp = (alpha / 2.0).sqrt();
        let par = (alpha * (alpha - 1.0) / 2.0).sqrt();
        let build = |a: f64, b: f64| {
            let mut m = [[0.0; 2]; 2];
            for i in 0..d {
                for j in 0..d {
                    let pp = z[i] * z[j];
                    let id = if i == j { 1.0 } else { 0.0 };
                    m[i][j] = a * (id - pp) + b * pp;
                }
            }
            m
        };
        Ok(Self {
            d,
            xi0: z,
            alpha,
            matrix: build(perp, par),
            inverse: build(1.0 / perp, 1.0 / par),
            det_abs: perp.powi(d as i32 - 1) * par,
        })
    }

    fn mul(m: &[[f64; 2]; 2], v: [f64; 2]) -> [f64; 2] {
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        Self::mul(&self.matrix, v)
    }

    pub fn apply_inverse(&self, v: [f64; 2]) -> [f64; 2] {
        Self::mul(&self.inverse, v)
    }

    /// |A0 ξ|².
    pub fn quadratic_form(&self, v: [f64; 2]) -> f64 {
        let w = self.apply(v);
        w[0] * w[0] + w[1] * w[1]
    }
}

/// Frequency-side Ã0: f̂ ↦ |det A0|^{-1/2} f̂(A0^{-1} ξ).
pub fn a0_apply(f: &TrialFunction, a: &A0Transform) -> Result<TrialFunction> {
    let grid = *f.grid();
    if grid.d != a.d {
        return Err(Error::DimensionMismatch {
            expected: grid.d,
            found: a.d,
        });
    }
    if a.alpha == 2.0 {
        return Ok(f.clone());
    }
    let lim = grid.xi_max;
    let lost = f.norm_fraction_where(|p| {
        let q = a.apply(p);
        q[0].abs() >= lim || q[1].abs() >= lim
    });
    if lost > 1e-6 {
        return Err(Error::SupportOverflow {
            lost_fraction: lost,
        });
    }
    let amp = Complex64::new(a.det_abs.powf(-0.5), 0.0);
    let values = pullback(&grid, f.values(), |xi| a.apply_inverse(xi), |_| amp);
    f.with_values(values)
}
