use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::params::ExtensionParams;
use crate::propagator::{alias_free_factor, FieldGenerator, SpaceTimeField, DEFAULT_TIME_NODES};
use crate::summation::{pairwise_sum, sum_abs_pow};
use crate::tail::fit_tail;
use crate::timegrid::TimeGrid;
use crate::trial::TrialFunction;

/// Discretization behind a reported norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub d: usize,
    pub xi_max: f64,
    pub m: usize,
    pub time_nodes: usize,
    pub t_max: f64,
    pub t_scale: f64,
    /// False when the power-law tail fit fell back to its default exponent.
    pub tail_fitted: bool,
}

impl GridInfo {
    fn new(f_grid: &crate::grid::FrequencyGrid, times: &TimeGrid, tail_fitted: bool) -> Self {
        Self {
            d: f_grid.d,
            xi_max: f_grid.xi_max,
            m: f_grid.m,
            time_nodes: times.len(),
            t_max: times.t_max,
            t_scale: times.t_scale,
            tail_fitted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    /// Norm over the truncated time box.
    pub value: f64,
    pub q: f64,
    pub grid: GridInfo,
    /// Extrapolated q-th power mass outside the time box.
    pub tail_bound: f64,
    pub refinement_delta: Option<f64>,
    pub wall_time_ms: u64,
}

impl NormReport {
    /// Norm with the extrapolated tail added to the q-th power.
    pub fn tail_corrected(&self) -> f64 {
        (self.value.powf(self.q) + self.tail_bound).powf(1.0 / self.q)
    }
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

fn weighted_sum(times: &TimeGrid, g: &[f64]) -> f64 {
    let terms: Vec<f64> = times.weights.iter().zip(g).map(|(w, v)| w * v).collect();
    pairwise_sum(&terms)
}

/// (∫∫|u|^q dx dt)^{1/q}: trapezoid in t, exact lattice sum in x.
pub fn spacetime_norm(u: &SpaceTimeField, q: f64) -> Result<NormReport> {
    if !(q >= 1.0) {
        return Err(invalid("q", format!("need q >= 1, got {q}")));
    }
    if u.times.len() < 2 {
        return Err(invalid("times", "need at least two time nodes"));
    }
    let start = Instant::now();
    let cell = u.grid.x_cell();
    let g: Vec<f64> = (0..u.times.len()).map(|k| sum_abs_pow(u.slice(k), q) * cell).collect();
    let tail = fit_tail(&u.times.nodes, &g);
    Ok(NormReport {
        value: weighted_sum(&u.times, &g).powf(1.0 / q),
        q,
        grid: GridInfo::new(&u.grid, &u.times, tail.fitted),
        tail_bound: tail.bound,
        refinement_delta: None,
        wall_time_ms: elapsed_ms(start),
    })
}

/// Grid maximum of |u|, a lower bound for the true supremum.
pub fn spacetime_sup(u: &SpaceTimeField) -> f64 {
    u.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Space-time L^q norm of a generated field without materializing it.
///
/// Slices are sampled on a spatial grid fine enough to integrate |u|^q without aliasing.
pub fn generator_norm(gen: &FieldGenerator, times: &TimeGrid, q: f64) -> Result<NormReport> {
    if !(q >= 1.0) {
        return Err(invalid("q", format!("need q >= 1, got {q}")));
    }
    let start = Instant::now();
    let g = gen.oversampled(alias_free_factor(q)).slice_integrals(&times.nodes, q);
    let tail = fit_tail(&times.nodes, &g);
    Ok(NormReport {
        value: weighted_sum(times, &g).powf(1.0 / q),
        q,
        grid: GridInfo::new(gen.grid(), times, tail.fitted),
        tail_bound: tail.bound,
        refinement_delta: None,
        wall_time_ms: elapsed_ms(start),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuotientOptions {
    pub time_nodes: usize,
    /// Repeat on the doubled grid (2M frequency nodes, 2Nt-1 time nodes).
    pub refine: bool,
}

impl Default for QuotientOptions {
    fn default() -> Self {
        Self {
            time_nodes: DEFAULT_TIME_NODES,
            refine: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientReport {
    /// ‖E_α f‖_{q0} / ‖f‖₂ with the extrapolated tail included.
    pub value: f64,
    /// Same quotient over the truncated time box only.
    pub truncated_value: f64,
    pub q: f64,
    pub alpha: f64,
    pub l2_norm: f64,
    pub grid: GridInfo,
    pub tail_bound: f64,
    pub refinement_delta: Option<f64>,
    pub wall_time_ms: u64,
}

fn quotient_once(f: &TrialFunction, params: &ExtensionParams, nt: usize) -> Result<QuotientReport> {
    let norm = f.l2_norm();
    let gen = FieldGenerator::extension(f, params);
    let times = gen.default_time_grid_for(nt, params.q0)?;
    let rep = generator_norm(&gen, &times, params.q0)?;
    Ok(QuotientReport {
        value: rep.tail_corrected() / norm,
        truncated_value: rep.value / norm,
        q: params.q0,
        alpha: params.alpha,
        l2_norm: norm,
        grid: rep.grid,
        tail_bound: rep.tail_bound / norm.powf(params.q0),
        refinement_delta: None,
        wall_time_ms: rep.wall_time_ms,
    })
}

/// Strichartz quotient ‖E_α f‖_{L^{q0}_{t,x}} / ‖f‖₂.
pub fn strichartz_quotient(f: &TrialFunction, params: &ExtensionParams, opts: QuotientOptions) -> Result<QuotientReport> {
    f.grid().check_dim(&vec![0.0; params.d])?;
    if f.l2_norm() == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let start = Instant::now();
    let mut rep = quotient_once(f, params, opts.time_nodes)?;
    if opts.refine {
        let fine = quotient_once(&f.refined(), params, 2 * opts.time_nodes - 1)?;
        rep.refinement_delta = Some((fine.value - rep.value).abs());
    }
    rep.wall_time_ms = elapsed_ms(start);
    Ok(rep)
}
