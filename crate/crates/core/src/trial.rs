use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::{FrequencyGrid, Spectral};
use crate::resample;
use crate::summation::sum_abs_pow;

/// Samples of f̂ on a frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFunction {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
    l2norm_cache: f64,
    /// Accumulated grid-snapped frequency translation.
    frequency_shift: [f64; 2],
}

fn norm_of(grid: &FrequencyGrid, values: &[Complex64]) -> f64 {
    (sum_abs_pow(values, 2.0) * grid.cell()).sqrt() / (2.0 * PI).powf(grid.d as f64 / 2.0)
}

impl TrialFunction {
    pub fn new(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(
                "values",
                format!("expected {} samples, got {}", grid.len(), values.len()),
            ));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("values", "non-finite sample"));
        }
        let l2norm_cache = norm_of(&grid, &values);
        Ok(Self {
            grid,
            values,
            l2norm_cache,
            frequency_shift: [0.0; 2],
        })
    }

    pub fn zeros(grid: FrequencyGrid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            l2norm_cache: 0.0,
            frequency_shift: [0.0; 2],
        }
    }

    /// Samples `f` at every grid node.
    pub fn from_fn<F: Fn([f64; 2]) -> Complex64>(grid: FrequencyGrid, f: F) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// (2π)^{-d/2} (Σ|f̂|² δξ^d)^{1/2}, i.e. ‖f‖₂ under the e^{-ixξ} convention.
    pub fn l2_norm(&self) -> f64 {
        self.l2norm_cache
    }

    pub fn frequency_shift(&self) -> &[f64] {
        &self.frequency_shift[..self.grid.d]
    }

    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        let mut out = Self::new(self.grid, values)?;
        out.frequency_shift = self.frequency_shift;
        Ok(out)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let values = self.values.iter().map(|z| z * c).collect();
        let mut out = Self::new(self.grid, values).expect("finite scaling");
        out.frequency_shift = self.frequency_shift;
        out
    }

    pub fn normalized(&self) -> Result<Self> {
        if self.l2norm_cache == 0.0 {
            return Err(Error::ZeroFunction);
        }
        let mut out = self.scaled(Complex64::new(1.0 / self.l2norm_cache, 0.0));
        out.l2norm_cache = 1.0;
        Ok(out)
    }

    /// Pointwise multiplier ξ ↦ m(ξ) applied to f̂.
    pub fn multiply<F: Fn([f64; 2]) -> Complex64>(&self, m: F) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, z)| z * m(self.grid.point(i)))
            .collect();
        self.with_values(values)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(invalid("other", "grids differ"));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Self::new(self.grid, values)
    }

    /// Real-space samples f(x_j) on the dual spatial grid.
    pub fn spatial(&self) -> Vec<Complex64> {
        Spectral::new(self.grid).synthesize(&self.values)
    }

    /// L² inner product ⟨f, g⟩ = (2π)^{-d} Σ f̂ conj(ĝ) δξ^d.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(invalid("other", "grids differ"));
        }
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(s * self.grid.cell() / (2.0 * PI).powi(self.grid.d as i32))
    }

    /// Frequency translation by ξ0 snapped to the nearest node offset.
    pub fn modulate(&self, xi0: &[f64]) -> Result<Self> {
        self.grid.check_dim(xi0)?;
        let h = self.grid.spacing();
        let shift: Vec<isize> = xi0.iter().map(|x| (x / h).round() as isize).collect();
        let m = self.grid.m as isize;
        let mut values = vec![Complex64::new(0.0, 0.0); self.values.len()];
        let mut lost = 0.0;
        for (idx, z) in self.values.iter().enumerate() {
            let [a, b] = self.grid.split(idx);
            let na = a as isize + shift[0];
            let nb = if self.grid.d == 2 { b as isize + shift[1] } else { 0 };
            if na < 0 || na >= m || nb < 0 || nb >= m {
                lost += z.norm_sqr();
                continue;
            }
            let dst = if self.grid.d == 1 {
                na as usize
            } else {
                (na * m + nb) as usize
            };
            values[dst] = *z;
        }
        let total = sum_abs_pow(&self.values, 2.0);
        if total > 0.0 && (lost / total).sqrt() > 1e-6 {
            return Err(Error::SupportOverflow {
                lost_fraction: (lost / total).sqrt(),
            });
        }
        let mut out = Self::new(self.grid, values)?;
        out.frequency_shift = self.frequency_shift;
        for (i, s) in shift.iter().enumerate() {
            out.frequency_shift[i] += *s as f64 * h;
        }
        Ok(out)
    }

    /// Same function on the grid with twice the nodes per axis (same Ξ).
    pub fn refined(&self) -> Self {
        let fine = resample::oversample(&self.grid, &self.values, 2);
        let mut out = Self::new(fine.grid, fine.values).expect("finite resample");
        out.frequency_shift = self.frequency_shift;
        out
    }

    /// Fraction of the L² norm (not squared) carried by nodes where `outside` holds.
    pub fn norm_fraction_where<F: Fn([f64; 2]) -> bool>(&self, outside: F) -> f64 {
        let total = sum_abs_pow(&self.values, 2.0);
        if total == 0.0 {
            return 0.0;
        }
        let lost: f64 = self
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| outside(self.grid.point(*i)))
            .map(|(_, z)| z.norm_sqr())
            .sum();
        (lost / total).sqrt()
    }
}

pub fn l2_norm(f: &TrialFunction) -> f64 {
    f.l2_norm()
}

/// f̂(ξ) = exp(-|ξ-ξc|²/(2σ²)), normalized to ‖f‖₂ = 1.
pub fn make_gaussian(grid: FrequencyGrid, center: &[f64], sigma: f64) -> Result<TrialFunction> {
    grid.check_dim(center)?;
    if !(sigma > 0.0) {
        return Err(invalid("sigma", format!("must be positive, got {sigma}")));
    }
    if center.iter().any(|c| c.abs() >= grid.xi_max) {
        return Err(invalid("center", "outside the grid box"));
    }
    let c = [center[0], if grid.d == 2 { center[1] } else { 0.0 }];
    let within = grid
        .points()
        .filter(|p| (p[0] - c[0]).hypot(p[1] - c[1]) <= sigma)
        .count();
    if within < 8 {
        return Err(Error::UnderResolved { nodes: within });
    }
    let s2 = 2.0 * sigma * sigma;
    TrialFunction::from_fn(grid, |p| {
        let r2 = (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2);
        Complex64::new((-r2 / s2).exp(), 0.0)
    })?
    .normalized()
}

/// Default trial Gaussian: centered, width Ξ/5.
pub fn default_gaussian(grid: FrequencyGrid) -> Result<TrialFunction> {
    make_gaussian(grid, &vec![0.0; grid.d], grid.xi_max / 5.0)
}
