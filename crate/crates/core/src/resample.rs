//! Band-limited resampling of frequency-side samples.
//!
//! The spatial samples are zero-padded to a box `factor` times larger, which
//! yields f̂ on a grid `factor` times finer; off-node values then come from
//! local Lagrange interpolation on that fine grid.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::grid::{FrequencyGrid, Spectral};

const STENCIL: usize = 8;

/// Oversampling factor used by the symmetry and A0 resamplers.
pub const OVERSAMPLE: usize = 4;

/// Frequency samples on a grid `factor` times finer than the source grid.
pub struct Oversampled {
    pub grid: FrequencyGrid,
    pub values: Vec<Complex64>,
}

/// Spatial samples of `values` on `grid` embedded in a box `factor` times larger.
pub fn pad_spatial(grid: &FrequencyGrid, spatial: &[Complex64], factor: usize) -> Vec<Complex64> {
    let m = grid.m;
    let mf = m * factor;
    let off = (factor - 1) * m / 2;
    let zero = Complex64::new(0.0, 0.0);
    if grid.d == 1 {
        let mut out = vec![zero; mf];
        out[off..off + m].copy_from_slice(spatial);
        out
    } else {
        let mut out = vec![zero; mf * mf];
        for a in 0..m {
            let dst = (a + off) * mf + off;
            out[dst..dst + m].copy_from_slice(&spatial[a * m..(a + 1) * m]);
        }
        out
    }
}

/// Re-express frequency samples on the grid with the same Ξ and `factor`·M nodes.
pub fn oversample(grid: &FrequencyGrid, values: &[Complex64], factor: usize) -> Oversampled {
    let spatial = Spectral::new(*grid).synthesize(values);
    let fine = FrequencyGrid {
        m: grid.m * factor,
        ..*grid
    };
    let mut padded = pad_spatial(grid, &spatial, factor);
    Spectral::new(fine).analyze_in_place(&mut padded);
    Oversampled {
        grid: fine,
        values: padded,
    }
}

fn lagrange_weights(p: f64) -> (isize, [f64; STENCIL]) {
    let base = p.floor() as isize - (STENCIL as isize / 2 - 1);
    let mut w = [0.0; STENCIL];
    for (m, wm) in w.iter_mut().enumerate() {
        let xm = (base + m as isize) as f64;
        let mut num = 1.0;
        let mut den = 1.0;
        for n in 0..STENCIL {
            if n != m {
                let xn = (base + n as isize) as f64;
                num *= p - xn;
                den *= xm - xn;
            }
        }
        *wm = num / den;
    }
    (base, w)
}

impl Oversampled {
    fn fetch(&self, a: isize, b: isize) -> Complex64 {
        let m = self.grid.m as isize;
        if a < 0 || a >= m || b < 0 || b >= m {
            return Complex64::new(0.0, 0.0);
        }
        if self.grid.d == 1 {
            self.values[a as usize]
        } else {
            self.values[(a * m + b) as usize]
        }
    }

    /// Interpolated value at an arbitrary frequency; zero outside the grid box.
    pub fn eval(&self, xi: [f64; 2]) -> Complex64 {
        let h = self.grid.spacing();
        let lo = -self.grid.xi_max;
        let hi = self.grid.xi_max;
        let zero = Complex64::new(0.0, 0.0);
        if xi[0] < lo || xi[0] > hi {
            return zero;
        }
        let (ba, wa) = lagrange_weights((xi[0] - lo) / h);
        if self.grid.d == 1 {
            let mut s = zero;
            for (i, w) in wa.iter().enumerate() {
                s += self.fetch(ba + i as isize, 0) * *w;
            }
            return s;
        }
        if xi[1] < lo || xi[1] > hi {
            return zero;
        }
        let (bb, wb) = lagrange_weights((xi[1] - lo) / h);
        let mut s = zero;
        for (i, w1) in wa.iter().enumerate() {
            let mut row = zero;
            for (j, w2) in wb.iter().enumerate() {
                row += self.fetch(ba + i as isize, bb + j as isize) * *w2;
            }
            s += row * *w1;
        }
        s
    }
}

/// Samples ξ ↦ scale(ξ)·f̂(source(ξ)) on `grid`, where f̂ is given by `values`.
pub fn pullback<S, W>(grid: &FrequencyGrid, values: &[Complex64], source: S, weight: W) -> Vec<Complex64>
where
    S: Fn([f64; 2]) -> [f64; 2] + Sync,
    W: Fn([f64; 2]) -> Complex64 + Sync,
{
    let fine = oversample(grid, values, OVERSAMPLE);
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let xi = grid.point(i);
            weight(xi) * fine.eval(source(xi))
        })
        .collect()
}
