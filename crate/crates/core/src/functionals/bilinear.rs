use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::norms::{GridInfo, NormReport};
use crate::error::{Error, Result};
use crate::geometry::DyadicCube;
use crate::grid::FrequencyGrid;
use crate::params::ExtensionParams;
use crate::propagator::FieldGenerator;
use crate::resample::{oversample, Oversampled, OVERSAMPLE};
use crate::summation::{pairwise_sum, sum_abs_pow};
use crate::tail::fit_tail;
use crate::timegrid::TimeGrid;
use crate::trial::TrialFunction;

/// Local grid: 32 nodes per axis at spacing ℓ/8, so each cube covers 8 nodes per axis.
const LOCAL_M: usize = 32;
const NODES_PER_SIDE: f64 = 8.0;
const BILINEAR_TIME_NODES: usize = 257;

/// Open exponent range ((d+3)/(d+1), (d+2)/d) of the bilinear estimate.
pub fn bilinear_exponent_range(d: usize) -> (f64, f64) {
    ((d as f64 + 3.0) / (d as f64 + 1.0), (d as f64 + 2.0) / d as f64)
}

pub fn check_bilinear_exponent(d: usize, p: f64) -> Result<()> {
    let (lo, hi) = bilinear_exponent_range(d);
    if p > lo && p < hi {
        Ok(())
    } else {
        Err(Error::ExponentRange { p, lo, hi })
    }
}

/// f̂·1_τ on a grid centred at c(τ), with phase |c(τ)+η|^α.
struct LocalPiece {
    gen: FieldGenerator,
    l2: f64,
}

fn local_piece(src: &Oversampled, cube: &DyadicCube, alpha: f64) -> Result<LocalPiece> {
    let d = cube.d;
    let h = cube.side() / NODES_PER_SIDE;
    let grid = FrequencyGrid::new(d, 0.5 * h * LOCAL_M as f64, LOCAL_M)?;
    let c = cube.center();
    let half = 0.5 * cube.side();
    let mut coeffs = Vec::with_capacity(grid.len());
    let mut omega = Vec::with_capacity(grid.len());
    for eta in grid.points() {
        let xi = [c[0] + eta[0], c[1] + eta[1]];
        let inside = (0..d).all(|k| eta[k] >= -half && eta[k] < half);
        coeffs.push(if inside { src.eval(xi) } else { Complex64::new(0.0, 0.0) });
        omega.push(xi[0].hypot(xi[1]).powf(alpha));
    }
    let l2 = TrialFunction::new(grid, coeffs.clone())?.l2_norm();
    Ok(LocalPiece {
        gen: FieldGenerator::new(grid, coeffs, omega),
        l2,
    })
}

fn corners(c: &DyadicCube) -> Vec<[f64; 2]> {
    let (lo, hi) = c.bounds();
    if c.d == 1 {
        vec![[lo[0], 0.0], [hi[0], 0.0], c.center()]
    } else {
        vec![[lo[0], lo[1]], [hi[0], lo[1]], [lo[0], hi[1]], [hi[0], hi[1]], c.center()]
    }
}

fn group_velocity(xi: [f64; 2], alpha: f64) -> [f64; 2] {
    let r = xi[0].hypot(xi[1]);
    if r == 0.0 {
        return [0.0; 2];
    }
    let a = alpha * r.powf(alpha - 2.0);
    [a * xi[0], a * xi[1]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilinearReport {
    pub norm: NormReport,
    pub p: f64,
    pub l2_tau: f64,
    pub l2_tau_prime: f64,
    pub volume: f64,
    /// LHS / (|τ|^{1-q0/(2p)} ‖f_τ‖₂ ‖f_τ'‖₂)
    pub ratio: f64,
}

/// ‖e^{it|∇|^α} f_τ · e^{it|∇|^α} f_τ'‖_{L^p_{t,x}} together with the normalized ratio.
pub fn bilinear_ratio(
    f: &TrialFunction,
    tau: &DyadicCube,
    tau_p: &DyadicCube,
    p: f64,
    params: &ExtensionParams,
) -> Result<BilinearReport> {
    let d = params.d;
    check_bilinear_exponent(d, p)?;
    if tau.d != d || tau_p.d != d || f.grid().d != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: if tau.d != d { tau.d } else { f.grid().d },
        });
    }
    if tau.side() != tau_p.side() {
        return Err(crate::error::invalid("cubes", "bilinear pieces need equal side lengths"));
    }
    let start = Instant::now();
    let src = oversample(f.grid(), f.values(), OVERSAMPLE);
    let a = local_piece(&src, tau, params.alpha)?;
    let b = local_piece(&src, tau_p, params.alpha)?;
    let grid = *a.gen.grid();
    let volume = tau.volume();
    if a.l2 == 0.0 || b.l2 == 0.0 {
        let norm = NormReport {
            value: 0.0,
            q: p,
            grid: GridInfo {
                d,
                xi_max: grid.xi_max,
                m: grid.m,
                time_nodes: 0,
                t_max: 0.0,
                t_scale: 0.0,
                tail_fitted: false,
            },
            tail_bound: 0.0,
            refinement_delta: None,
            wall_time_ms: start.elapsed().as_millis() as u64,
        };
        return Ok(BilinearReport {
            norm,
            p,
            l2_tau: a.l2,
            l2_tau_prime: b.l2,
            volume,
            ratio: 0.0,
        });
    }
    // the packets separate at the relative group velocity; stop before they have crossed half the box
    let mut v_rel: f64 = 0.0;
    for x in corners(tau) {
        for y in corners(tau_p) {
            let (gx, gy) = (group_velocity(x, params.alpha), group_velocity(y, params.alpha));
            v_rel = v_rel.max((gx[0] - gy[0]).hypot(gx[1] - gy[1]));
        }
    }
    if v_rel == 0.0 {
        return Err(Error::EmptyTimeBox);
    }
    let t_max = 0.5 * grid.box_len() / v_rel;
    let times = TimeGrid::sinh_mapped(t_max / 100.0, t_max, BILINEAR_TIME_NODES)?;
    let cell = grid.x_cell();
    let g: Vec<f64> = times
        .nodes
        .par_iter()
        .map(|&t| {
            let ua = a.gen.slice(t);
            let ub = b.gen.slice(t);
            let prod: Vec<Complex64> = ua.iter().zip(&ub).map(|(x, y)| x * y).collect();
            sum_abs_pow(&prod, p) * cell
        })
        .collect();
    let terms: Vec<f64> = times.weights.iter().zip(&g).map(|(w, v)| w * v).collect();
    let value = pairwise_sum(&terms).powf(1.0 / p);
    let tail = fit_tail(&times.nodes, &g);
    let norm = NormReport {
        value,
        q: p,
        grid: GridInfo {
            d,
            xi_max: grid.xi_max,
            m: grid.m,
            time_nodes: times.len(),
            t_max,
            t_scale: times.t_scale,
            tail_fitted: tail.fitted,
        },
        tail_bound: tail.bound,
        refinement_delta: None,
        wall_time_ms: start.elapsed().as_millis() as u64,
    };
    let ratio = value / (volume.powf(1.0 - params.q0 / (2.0 * p)) * a.l2 * b.l2);
    Ok(BilinearReport {
        norm,
        p,
        l2_tau: a.l2,
        l2_tau_prime: b.l2,
        volume,
        ratio,
    })
}

pub fn bilinear_norm(
    f: &TrialFunction,
    tau: &DyadicCube,
    tau_p: &DyadicCube,
    p: f64,
    params: &ExtensionParams,
) -> Result<NormReport> {
    Ok(bilinear_ratio(f, tau, tau_p, p, params)?.norm)
}

/// An axis-parallel frequency cube [lo, lo + side)^d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyCube {
    pub d: usize,
    pub lo: [f64; 2],
    pub side: f64,
}

impl FrequencyCube {
    pub fn volume(&self) -> f64 {
        self.side.powi(self.d as i32)
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        (0..self.d).all(|k| p[k] >= self.lo[k] && p[k] < self.lo[k] + self.side)
    }
}

/// Dyadic subdivisions of the grid box [-Ξ, Ξ)^d down to `depth` halvings.
pub fn dyadic_family(grid: &FrequencyGrid, depth: u32) -> Vec<FrequencyCube> {
    let mut out = Vec::new();
    for k in 0..=depth {
        let n = 1usize << k;
        let side = 2.0 * grid.xi_max / n as f64;
        for i in 0..n {
            let ys = if grid.d == 2 { n } else { 1 };
            for j in 0..ys {
                let lo = [-grid.xi_max + i as f64 * side, if grid.d == 2 { -grid.xi_max + j as f64 * side } else { 0.0 }];
                out.push(FrequencyCube { d: grid.d, lo, side });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeSupReport {
    pub value: f64,
    pub argmax: Option<FrequencyCube>,
    pub cubes: usize,
    pub time_nodes: usize,
}

/// sup_Q |Q|^{-1/2} ‖e^{it|∇|^α} f_Q‖_{L^∞_{t,x}}, maxima taken over the sampled space-time grid.
pub fn cube_sup_quantity(f: &TrialFunction, alpha: f64, family: &[FrequencyCube], time_nodes: usize) -> Result<CubeSupReport> {
    if f.l2_norm() == 0.0 {
        return Ok(CubeSupReport {
            value: 0.0,
            argmax: None,
            cubes: family.len(),
            time_nodes: 0,
        });
    }
    let times = FieldGenerator::evolution(f, alpha).default_time_grid(time_nodes)?;
    let mut best = 0.0;
    let mut arg = None;
    for q in family {
        let fq = f.multiply(|p| if q.contains(p) { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })?;
        if fq.l2_norm() == 0.0 {
            continue;
        }
        let gen = FieldGenerator::evolution(&fq, alpha);
        let m = times
            .nodes
            .par_iter()
            .map(|&t| gen.slice(t).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .reduce(|| 0.0, f64::max);
        let v = m / q.volume().sqrt();
        if v > best {
            best = v;
            arg = Some(*q);
        }
    }
    Ok(CubeSupReport {
        value: best,
        argmax: arg,
        cubes: family.len(),
        time_nodes: times.len(),
    })
}
