use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Uniform frequency grid {-Ξ + kδξ : 0 <= k < M}^d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub d: usize,
    pub xi_max: f64,
    pub m: usize,
}

impl FrequencyGrid {
    pub fn new(d: usize, xi_max: f64, m: usize) -> Result<Self> {
        if d != 1 && d != 2 {
            return Err(Error::UnsupportedDimension(d));
        }
        if !(xi_max > 0.0) || !xi_max.is_finite() {
            return Err(invalid("xi_max", format!("must be positive, got {xi_max}")));
        }
        if !m.is_power_of_two() || m < 8 {
            return Err(invalid("m", format!("must be a power of two >= 8, got {m}")));
        }
        Ok(Self { d, xi_max, m })
    }

    /// d=1: Ξ=32, M=2048. d=2: Ξ=16, M=256.
    pub fn default_for(d: usize) -> Result<Self> {
        match d {
            1 => Self::new(1, 32.0, 2048),
            2 => Self::new(2, 16.0, 256),
            _ => Err(Error::UnsupportedDimension(d)),
        }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.xi_max / self.m as f64
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, k: usize) -> f64 {
        -self.xi_max + k as f64 * self.spacing()
    }

    /// Frequency-cell volume δξ^d.
    pub fn cell(&self) -> f64 {
        self.spacing().powi(self.d as i32)
    }

    /// Side length of the dual spatial box, 2π/δξ.
    pub fn box_len(&self) -> f64 {
        2.0 * PI / self.spacing()
    }

    pub fn dx(&self) -> f64 {
        self.box_len() / self.m as f64
    }

    pub fn x_node(&self, j: usize) -> f64 {
        -0.5 * self.box_len() + j as f64 * self.dx()
    }

    pub fn x_cell(&self) -> f64 {
        self.dx().powi(self.d as i32)
    }

    /// Per-axis indices of a flat row-major index.
    pub fn split(&self, idx: usize) -> [usize; 2] {
        if self.d == 1 {
            [idx, 0]
        } else {
            [idx / self.m, idx % self.m]
        }
    }

    /// Frequency coordinates of a flat index (unused axes are 0).
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let [a, b] = self.split(idx);
        if self.d == 1 {
            [self.node(a), 0.0]
        } else {
            [self.node(a), self.node(b)]
        }
    }

    pub fn x_point(&self, idx: usize) -> [f64; 2] {
        let [a, b] = self.split(idx);
        if self.d == 1 {
            [self.x_node(a), 0.0]
        } else {
            [self.x_node(a), self.x_node(b)]
        }
    }

    pub fn points(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Index of the node nearest to `xi` along one axis, if inside the grid.
    pub fn nearest(&self, xi: f64) -> Option<usize> {
        let k = ((xi + self.xi_max) / self.spacing()).round();
        if k >= 0.0 && (k as usize) < self.m {
            Some(k as usize)
        } else {
            None
        }
    }

    /// Same Ξ, twice the nodes per axis (spatial box doubles).
    pub fn refined(&self) -> Self {
        Self { m: 2 * self.m, ..*self }
    }

    pub fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: v.len(),
            });
        }
        Ok(())
    }
}

/// Exact discrete Fourier pair between a frequency grid and its dual spatial grid.
///
/// `synthesize` evaluates u(x_j) = (2π)^{-d} Σ_k c_k e^{i x_j ξ_k} δξ^d and
/// `analyze` evaluates ĉ(ξ_k) = Σ_j u_j e^{-i x_j ξ_k} δx^d; they are inverse to
/// each other. With M divisible by 4 the phase e^{i x_j ξ_k} reduces to
/// (-1)^{j+k} e^{2πi jk/M}.
#[derive(Clone)]
pub struct Spectral {
    grid: FrequencyGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch_len: usize,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: FrequencyGrid) -> Self {
        let mut planner = FftPlanner::<f64>::new();
        let forward = planner.plan_fft_forward(grid.m);
        let inverse = planner.plan_fft_inverse(grid.m);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            grid,
            forward,
            inverse,
            scratch_len,
        }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    fn checkerboard(&self, buf: &mut [Complex64], scale: f64) {
        let m = self.grid.m;
        if self.grid.d == 1 {
            for (k, z) in buf.iter_mut().enumerate() {
                *z *= if k % 2 == 0 { scale } else { -scale };
            }
        } else {
            for (idx, z) in buf.iter_mut().enumerate() {
                let parity = (idx / m + idx % m) % 2;
                *z *= if parity == 0 { scale } else { -scale };
            }
        }
    }

    fn fft_all_axes(&self, buf: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.scratch_len];
        plan.process_with_scratch(buf, &mut scratch);
        if self.grid.d == 2 {
            transpose_square(buf, self.grid.m);
            plan.process_with_scratch(buf, &mut scratch);
            transpose_square(buf, self.grid.m);
        }
    }

    /// Frequency coefficients to spatial samples, in place.
    pub fn synthesize_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.grid.len());
        self.checkerboard(buf, 1.0);
        self.fft_all_axes(buf, &self.inverse);
        let scale = (self.grid.spacing() / (2.0 * PI)).powi(self.grid.d as i32);
        self.checkerboard(buf, scale);
    }

    /// Spatial samples to frequency coefficients, in place.
    pub fn analyze_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.grid.len());
        self.checkerboard(buf, 1.0);
        self.fft_all_axes(buf, &self.forward);
        self.checkerboard(buf, self.grid.x_cell());
    }

    pub fn synthesize(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut buf = coeffs.to_vec();
        self.synthesize_in_place(&mut buf);
        buf
    }

    pub fn analyze(&self, samples: &[Complex64]) -> Vec<Complex64> {
        let mut buf = samples.to_vec();
        self.analyze_in_place(&mut buf);
        buf
    }
}

fn transpose_square(buf: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in (i + 1)..m {
            buf.swap(i * m + j, j * m + i);
        }
    }
}
