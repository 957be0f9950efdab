use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{FrequencyGrid, Spectral};
use crate::params::ExtensionParams;
use crate::summation::sum_abs_pow;
use crate::tail::fit_tail;
use crate::timegrid::TimeGrid;
use crate::trial::TrialFunction;

use super::a0::A0Transform;
use super::phase::{limit_phase_at, shifted_phase_at, ShiftedPhaseContext};

/// Default number of time nodes.
pub const DEFAULT_TIME_NODES: usize = 513;

/// Relative amplitude below which coefficients count as negligible.
const SIGNIFICANT: f64 = 1e-4;
/// Fraction of ∫|u(0)|^q allowed outside the spatial extent.
const EXTENT_TOL: f64 = 1e-10;

/// Spatial oversampling factor that makes the x-sum of |u|^q exact for even integer q.
pub fn alias_free_factor(q: f64) -> usize {
    let need = (q / 2.0).ceil().max(1.0) as usize;
    need.next_power_of_two()
}

/// Samples of u(t, x) on a time grid times the spatial grid dual to `grid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeField {
    pub params: ExtensionParams,
    pub times: TimeGrid,
    pub grid: FrequencyGrid,
    /// Row-major, time slowest.
    pub values: Vec<Complex64>,
    /// Extrapolated ∫_{|t|>T}∫|u|^{q0} dx dt.
    pub tail_bound: f64,
}

impl SpaceTimeField {
    pub fn slice(&self, k: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.values[k * n..(k + 1) * n]
    }
}

/// Which representation of the frequency-shifted operator to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShiftedForm {
    /// Weight |ξ+ξn|^{(α-2)/q0}, phase |ξ+ξn|^α.
    Raw,
    /// Weight |ξ/|ξn| + ξ̄n|^{(α-2)/q0}, phase Φn.
    Normalized,
}

/// Lazily evaluates u(t) = F^{-1}[c(ξ) e^{itω(ξ)}] one time slice at a time.
#[derive(Debug, Clone)]
pub struct FieldGenerator {
    grid: FrequencyGrid,
    spectral: Spectral,
    coeffs: Vec<Complex64>,
    omega: Vec<f64>,
}

/// Time-box scales derived from the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeScales {
    /// Largest |t| before the fastest significant component wraps around the box.
    pub t_max: f64,
    /// Dispersion time of the curvature part of the phase.
    pub t_scale: f64,
}

impl FieldGenerator {
    pub fn new(grid: FrequencyGrid, coeffs: Vec<Complex64>, omega: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), grid.len());
        assert_eq!(omega.len(), grid.len());
        Self {
            grid,
            spectral: Spectral::new(grid),
            coeffs,
            omega,
        }
    }

    fn build<W, P>(f: &TrialFunction, weight: W, phase: P) -> Self
    where
        W: Fn([f64; 2]) -> f64,
        P: Fn([f64; 2]) -> f64,
    {
        let grid = *f.grid();
        let mut coeffs = Vec::with_capacity(grid.len());
        let mut omega = Vec::with_capacity(grid.len());
        for (i, z) in f.values().iter().enumerate() {
            let xi = grid.point(i);
            coeffs.push(z * weight(xi));
            omega.push(phase(xi));
        }
        Self::new(grid, coeffs, omega)
    }

    /// e^{it|∇|^α} f.
    pub fn evolution(f: &TrialFunction, alpha: f64) -> Self {
        Self::build(f, |_| 1.0, |xi| xi[0].hypot(xi[1]).powf(alpha))
    }

    /// E_α f = D^{(α-2)/q0} e^{it|∇|^α} f.
    pub fn extension(f: &TrialFunction, params: &ExtensionParams) -> Self {
        let s = params.weight_exponent();
        let alpha = params.alpha;
        Self::build(
            f,
            |xi| weight_pow(xi[0].hypot(xi[1]), s),
            |xi| xi[0].hypot(xi[1]).powf(alpha),
        )
    }

    /// D^s e^{it|∇|^α} f for s >= 0.
    pub fn weighted_evolution(f: &TrialFunction, alpha: f64, s: f64) -> Self {
        Self::build(
            f,
            |xi| weight_pow(xi[0].hypot(xi[1]), s),
            |xi| xi[0].hypot(xi[1]).powf(alpha),
        )
    }

    /// Flow with the quadratic limit phase |A0 ξ|².
    pub fn limit(f: &TrialFunction, xi0: &[f64], alpha: f64) -> Self {
        let z = [xi0[0], *xi0.get(1).unwrap_or(&0.0)];
        Self::build(f, |_| 1.0, |xi| limit_phase_at(xi, z, alpha))
    }

    /// Free Schrödinger flow e^{it|ξ|²}.
    pub fn schrodinger(f: &TrialFunction) -> Self {
        Self::build(f, |_| 1.0, |xi| xi[0] * xi[0] + xi[1] * xi[1])
    }

    pub fn shifted(f: &TrialFunction, ctx: &ShiftedPhaseContext, form: ShiftedForm) -> Self {
        let s = ctx.params.weight_exponent();
        let alpha = ctx.params.alpha;
        let r = ctx.xi_n_abs;
        let xn = ctx.xi_n;
        match form {
            ShiftedForm::Normalized => Self::build(
                f,
                |xi| weight_pow((xi[0] / r + ctx.xi_bar[0]).hypot(xi[1] / r + ctx.xi_bar[1]), s),
                |xi| shifted_phase_at(ctx, xi),
            ),
            ShiftedForm::Raw => Self::build(
                f,
                |xi| weight_pow((xi[0] + xn[0]).hypot(xi[1] + xn[1]), s),
                |xi| (xi[0] + xn[0]).hypot(xi[1] + xn[1]).powf(alpha),
            ),
        }
    }

    /// Same field sampled `factor` times more finely in space (zero-padded spectrum).
    ///
    /// |u|^q of a field band-limited to [-Ξ, Ξ) is band-limited to q·Ξ, so the lattice
    /// sum in x is exact for even integer q once factor >= q/2.
    pub fn oversampled(&self, factor: usize) -> Self {
        if factor <= 1 {
            return self.clone();
        }
        let m = self.grid.m;
        let mf = m * factor;
        let grid = FrequencyGrid {
            m: mf,
            xi_max: self.grid.xi_max * factor as f64,
            ..self.grid
        };
        let off = (factor - 1) * m / 2;
        let zero = Complex64::new(0.0, 0.0);
        let (coeffs, omega) = if self.grid.d == 1 {
            let mut c = vec![zero; mf];
            let mut w = vec![0.0; mf];
            c[off..off + m].copy_from_slice(&self.coeffs);
            w[off..off + m].copy_from_slice(&self.omega);
            (c, w)
        } else {
            let mut c = vec![zero; mf * mf];
            let mut w = vec![0.0; mf * mf];
            for a in 0..m {
                let dst = (a + off) * mf + off;
                c[dst..dst + m].copy_from_slice(&self.coeffs[a * m..(a + 1) * m]);
                w[dst..dst + m].copy_from_slice(&self.omega[a * m..(a + 1) * m]);
            }
            (c, w)
        };
        Self::new(grid, coeffs, omega)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    /// u(t, x_j) for all spatial nodes, written into `buf`.
    pub fn slice_into(&self, t: f64, buf: &mut Vec<Complex64>) {
        buf.clear();
        buf.extend(
            self.coeffs
                .iter()
                .zip(&self.omega)
                .map(|(c, w)| c * Complex64::from_polar(1.0, t * w)),
        );
        self.spectral.synthesize_in_place(buf);
    }

    pub fn slice(&self, t: f64) -> Vec<Complex64> {
        let mut buf = Vec::with_capacity(self.grid.len());
        self.slice_into(t, &mut buf);
        buf
    }

    /// ∫|u(t_k, x)|^q dx for each node, evaluated in parallel and returned in node order.
    pub fn slice_integrals(&self, times: &[f64], q: f64) -> Vec<f64> {
        let cell = self.grid.x_cell();
        times
            .par_iter()
            .map_init(
                || Vec::with_capacity(self.grid.len()),
                |buf, &t| {
                    self.slice_into(t, buf);
                    sum_abs_pow(buf, q) * cell
                },
            )
            .collect()
    }

    fn significant_coeffs(&self) -> Vec<usize> {
        let cmax = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        (0..self.coeffs.len())
            .filter(|&i| self.coeffs[i].norm() >= SIGNIFICANT * cmax)
            .collect()
    }

    fn gradient(&self, idx: usize) -> [f64; 2] {
        let m = self.grid.m;
        let h = self.grid.spacing();
        let [a, b] = self.grid.split(idx);
        let at = |a: usize, b: usize| {
            if self.grid.d == 1 {
                self.omega[a]
            } else {
                self.omega[a * m + b]
            }
        };
        let diff = |lo: f64, hi: f64, span: f64| (hi - lo) / (span * h);
        let axis = |k: usize, get: &dyn Fn(usize) -> f64| {
            if k == 0 {
                diff(get(0), get(1), 1.0)
            } else if k == m - 1 {
                diff(get(m - 2), get(m - 1), 1.0)
            } else {
                diff(get(k - 1), get(k + 1), 2.0)
            }
        };
        let g0 = axis(a, &|k| at(k, b));
        let g1 = if self.grid.d == 2 {
            axis(b, &|k| at(a, k))
        } else {
            0.0
        };
        [g0, g1]
    }

    /// Width (per axis, largest) of the smallest periodic window holding all but a
    /// fraction `EXTENT_TOL` of ∫|u(0)|^q dx.
    fn spatial_extent(&self, q: f64) -> f64 {
        let u = self.slice(0.0);
        let m = self.grid.m;
        let mut widest: f64 = 0.0;
        for axis in 0..self.grid.d {
            let mut marginal = vec![0.0f64; m];
            for (i, z) in u.iter().enumerate() {
                marginal[self.grid.split(i)[axis]] += z.norm().powf(q);
            }
            let total: f64 = marginal.iter().sum();
            if total == 0.0 {
                return 0.0;
            }
            let budget = EXTENT_TOL * total;
            // longest circular run whose mass fits in the budget
            let mut best = 0usize;
            let mut lo = 0usize;
            let mut acc = 0.0;
            for hi in 0..2 * m {
                acc += marginal[hi % m];
                while acc > budget && lo <= hi {
                    acc -= marginal[lo % m];
                    lo += 1;
                }
                best = best.max((hi + 1 - lo).min(m));
            }
            widest = widest.max((m - best) as f64 * self.grid.dx());
        }
        widest
    }

    /// Wrap-limited time box and dispersive time scale, with the spatial extent
    /// measured in ∫|u|^2.
    pub fn time_scales(&self) -> Result<TimeScales> {
        self.time_scales_for(2.0)
    }

    /// Wrap-limited time box and dispersive time scale; the extent is measured in ∫|u|^q.
    pub fn time_scales_for(&self, q: f64) -> Result<TimeScales> {
        let sig = self.significant_coeffs();
        if sig.is_empty() {
            return Err(Error::ZeroFunction);
        }
        let d = self.grid.d;
        let mut vmin = [f64::INFINITY; 2];
        let mut vmax = [f64::NEG_INFINITY; 2];
        let mut weight_sum = 0.0;
        let mut centroid = [0.0; 2];
        for &i in &sig {
            let g = self.gradient(i);
            for k in 0..d {
                vmin[k] = vmin[k].min(g[k]);
                vmax[k] = vmax[k].max(g[k]);
            }
            let w = self.coeffs[i].norm_sqr();
            let p = self.grid.point(i);
            centroid[0] += w * p[0];
            centroid[1] += w * p[1];
            weight_sum += w;
        }
        let spread = (0..d).map(|k| vmax[k] - vmin[k]).fold(0.0, f64::max);
        let extent = self.spatial_extent(q);
        let room = self.grid.box_len() - extent;
        if room <= 0.0 {
            return Err(Error::EmptyTimeBox);
        }
        // a packet spreading at `spread` needs the whole free room before it wraps
        let t_max = if spread > 0.0 { room / spread } else { f64::INFINITY };
        centroid = [centroid[0] / weight_sum, centroid[1] / weight_sum];
        let c_idx = self.nearest_index(centroid);
        let w0 = self.omega[c_idx];
        let g0 = self.gradient(c_idx);
        let p0 = self.grid.point(c_idx);
        let curvature = sig
            .iter()
            .map(|&i| {
                let p = self.grid.point(i);
                (self.omega[i] - w0 - g0[0] * (p[0] - p0[0]) - g0[1] * (p[1] - p0[1])).abs()
            })
            .fold(0.0, f64::max);
        if !t_max.is_finite() {
            return Err(Error::EmptyTimeBox);
        }
        let t_scale = if curvature > 0.0 {
            (1.0 / curvature).min(t_max / 4.0)
        } else {
            t_max / 4.0
        };
        Ok(TimeScales { t_max, t_scale })
    }

    fn nearest_index(&self, p: [f64; 2]) -> usize {
        let a = self.grid.nearest(p[0]).unwrap_or(self.grid.m / 2);
        if self.grid.d == 1 {
            a
        } else {
            let b = self.grid.nearest(p[1]).unwrap_or(self.grid.m / 2);
            a * self.grid.m + b
        }
    }

    /// Sinh-mapped grid on the wrap-limited box with `n` nodes.
    pub fn default_time_grid(&self, n: usize) -> Result<TimeGrid> {
        self.default_time_grid_for(n, 2.0)
    }

    /// As [`Self::default_time_grid`], with the extent measured in ∫|u|^q.
    pub fn default_time_grid_for(&self, n: usize, q: f64) -> Result<TimeGrid> {
        let s = self.time_scales_for(q)?;
        TimeGrid::sinh_mapped(s.t_scale, s.t_max, n)
    }

    /// Materializes the field on `times`; the tail bound is fitted for the exponent q0.
    pub fn materialize(&self, params: ExtensionParams, times: TimeGrid) -> SpaceTimeField {
        let n = self.grid.len();
        let slices: Vec<Vec<Complex64>> = times.nodes.par_iter().map(|&t| self.slice(t)).collect();
        let mut values = Vec::with_capacity(n * times.len());
        for s in slices {
            values.extend(s);
        }
        let cell = self.grid.x_cell();
        let g: Vec<f64> = values
            .chunks(n)
            .map(|s| sum_abs_pow(s, params.q0) * cell)
            .collect();
        let tail_bound = fit_tail(&times.nodes, &g).bound;
        SpaceTimeField {
            params,
            times,
            grid: self.grid,
            values,
            tail_bound,
        }
    }
}

pub(crate) fn weight_pow(r: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else if r == 0.0 {
        0.0
    } else {
        r.powf(s)
    }
}

/// Spatial samples of e^{it|∇|^α} f.
pub fn evolve(f: &TrialFunction, t: f64, params: &ExtensionParams) -> Vec<Complex64> {
    FieldGenerator::evolution(f, params.alpha).slice(t)
}

/// f̂ ↦ |ξ|^s f̂; the ξ = 0 node maps to 0 for s > 0.
pub fn fractional_derivative(f: &TrialFunction, s: f64) -> Result<TrialFunction> {
    let grid = *f.grid();
    if s < 0.0 {
        for (i, z) in f.values().iter().enumerate() {
            let p = grid.point(i);
            if p[0] == 0.0 && p[1] == 0.0 && z.norm() > 1e-12 {
                return Err(Error::Singularity {
                    order: s,
                    value: z.norm(),
                });
            }
        }
    }
    if s == 0.0 {
        return Ok(f.clone());
    }
    f.multiply(|xi| {
        let r = xi[0].hypot(xi[1]);
        Complex64::new(if r == 0.0 { 0.0 } else { r.powf(s) }, 0.0)
    })
}

/// E_α f sampled on `times`.
pub fn extension_field(f: &TrialFunction, times: TimeGrid, params: &ExtensionParams) -> SpaceTimeField {
    FieldGenerator::extension(f, params).materialize(*params, times)
}

/// T̄n_α f (normalized form) on `times`; flags the |ξ| <= |ξn|/5 support condition.
pub fn shifted_field(
    f: &TrialFunction,
    ctx: &ShiftedPhaseContext,
    times: TimeGrid,
    form: ShiftedForm,
) -> (SpaceTimeField, bool) {
    let ok = support_within(f, ctx.xi_n_abs / 5.0);
    let field = FieldGenerator::shifted(f, ctx, form).materialize(ctx.params, times);
    (field, ok)
}

/// True when f̂ carries no significant mass outside the ball of radius `r`.
pub fn support_within(f: &TrialFunction, r: f64) -> bool {
    f.norm_fraction_where(|p| p[0].hypot(p[1]) > r) <= 1e-6
}

/// Ã0 image under the limit transform for direction ξ0.
pub fn limit_transform(f: &TrialFunction, xi0: &[f64], alpha: f64) -> Result<TrialFunction> {
    super::a0::a0_apply(f, &A0Transform::new(f.grid().d, xi0, alpha)?)
}

/// Least-squares slope of log|u(t, 0)| against log(1 + t²) over nodes with t in [t_lo, t_hi].
pub fn axis_decay_exponent(gen: &FieldGenerator, t_lo: f64, t_hi: f64, n: usize) -> f64 {
    let grid = gen.grid();
    let origin = if grid.d == 1 {
        grid.m / 2
    } else {
        (grid.m / 2) * grid.m + grid.m / 2
    };
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let t = t_lo * (t_hi / t_lo).powf(k as f64 / (n - 1) as f64);
            let u = gen.slice(t)[origin].norm();
            ((1.0 + t * t).ln(), u.ln())
        })
        .collect();
    let nn = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nn;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nn;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}

/// Spatial L² norm of samples on the dual grid of `grid`.
pub fn spatial_l2(grid: &FrequencyGrid, u: &[Complex64]) -> f64 {
    (sum_abs_pow(u, 2.0) * grid.x_cell()).sqrt()
}
