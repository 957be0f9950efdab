use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sectors::{a1_sup, SectorDecomposition};
use crate::error::{Error, Result};

pub type Mat2 = [[f64; 2]; 2];

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// F_η(ξ) = |ξ|^α + |η|^α - |ξ+η|^α / 2^{α-1}.
pub fn f_eta(xi: [f64; 2], eta: [f64; 2], alpha: f64) -> f64 {
    let s = [xi[0] + eta[0], xi[1] + eta[1]];
    norm(xi).powf(alpha) + norm(eta).powf(alpha) - norm(s).powf(alpha) * 2f64.powf(1.0 - alpha)
}

// Hessian of |v|^α, written as α|v|^{α-2}(E + (α-2) v̂v̂ᵀ).
fn hess_pow(v: [f64; 2], alpha: f64, d: usize, out: &mut Mat2, weight: f64) {
    let r = norm(v);
    if r == 0.0 {
        if alpha == 2.0 {
            for (i, row) in out.iter_mut().enumerate().take(d) {
                row[i] += weight * 2.0;
            }
        }
        return;
    }
    let a = alpha * r.powf(alpha - 2.0) * weight;
    let u = [v[0] / r, v[1] / r];
    for i in 0..d {
        for j in 0..d {
            let e = if i == j { 1.0 } else { 0.0 };
            out[i][j] += a * (e + (alpha - 2.0) * u[i] * u[j]);
        }
    }
}

/// Closed-form Hessian of F_η at ξ; the upper-left d×d block is meaningful.
pub fn hessian_f_eta(xi: [f64; 2], eta: [f64; 2], alpha: f64, d: usize) -> Result<Mat2> {
    let s = [xi[0] + eta[0], xi[1] + eta[1]];
    if norm(s) == 0.0 && alpha > 2.0 && alpha < 4.0 {
        return Err(Error::DegenerateDirection);
    }
    let mut h = [[0.0; 2]; 2];
    hess_pow(xi, alpha, d, &mut h, 1.0);
    hess_pow(s, alpha, d, &mut h, -(2f64.powf(1.0 - alpha)));
    Ok(h)
}

/// Eigenvalues (min, max) of a symmetric d×d block.
pub fn sym_eigenvalues(m: &Mat2, d: usize) -> (f64, f64) {
    if d == 1 {
        return (m[0][0], m[0][0]);
    }
    let tr = 0.5 * (m[0][0] + m[1][1]);
    let disc = (0.5 * (m[0][0] - m[1][1])).hypot(m[0][1]);
    (tr - disc, tr + disc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub xi: [f64; 2],
    pub eta: [f64; 2],
    pub y: [f64; 2],
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HessianScan {
    pub alpha: f64,
    pub samples: usize,
    pub c1: f64,
    pub c2: f64,
    pub min_eig: f64,
    pub max_eig: f64,
    pub per_sector_min: Vec<f64>,
    /// Largest sampled |cos²θ(ξ,y) - cos²θ(ξ+η,y)|.
    pub a1_max: f64,
    pub a1_bound: f64,
    pub a1_violations: usize,
    pub a1_witness: Option<Witness>,
    /// Smallest sampled 1 + (α-2)[cos²θ(ξ,y) - cos²θ(ξ+η,y)].
    pub quad_form_min: f64,
    pub quad_violations: usize,
    pub quad_witness: Option<Witness>,
}

struct Acc {
    min_eig: f64,
    max_eig: f64,
    a1_max: f64,
    a1_viol: usize,
    a1_w: Option<Witness>,
    q_min: f64,
    q_viol: usize,
    q_w: Option<Witness>,
}

impl Acc {
    fn new() -> Self {
        Acc {
            min_eig: f64::INFINITY,
            max_eig: f64::NEG_INFINITY,
            a1_max: 0.0,
            a1_viol: 0,
            a1_w: None,
            q_min: f64::INFINITY,
            q_viol: 0,
            q_w: None,
        }
    }

    fn merge(mut self, o: Acc) -> Acc {
        self.min_eig = self.min_eig.min(o.min_eig);
        self.max_eig = self.max_eig.max(o.max_eig);
        if o.a1_max > self.a1_max {
            self.a1_max = o.a1_max;
        }
        self.a1_viol += o.a1_viol;
        self.a1_w = self.a1_w.or(o.a1_w);
        self.q_min = self.q_min.min(o.q_min);
        self.q_viol += o.q_viol;
        self.q_w = self.q_w.or(o.q_w);
        self
    }
}

fn cos2(a: [f64; 2], y: [f64; 2]) -> f64 {
    let c = (a[0] * y[0] + a[1] * y[1]) / (norm(a) * norm(y));
    c * c
}

const CHUNK: usize = 1024;

/// Samples same-sector pairs (ξ, η) with |ξ| >= |η| in each sector and records
/// Hessian eigenvalue extremes and the (A.1) / quadratic-form checks.
pub fn hessian_bounds_scan(sectors: &SectorDecomposition, alpha: f64, samples: usize, seed: u64) -> HessianScan {
    let d = sectors.config.d;
    let k = sectors.sectors.len();
    let a1_bound = if alpha > 2.0 { 1.0 / (2.0 * alpha - 4.0) } else { f64::INFINITY };
    let per_sector = samples.div_ceil(k).max(1);
    let results: Vec<Acc> = (0..k)
        .into_par_iter()
        .map(|j| {
            let chunks = per_sector.div_ceil(CHUNK);
            (0..chunks)
                .map(|c| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream((j * chunks + c) as u64);
                    let n = CHUNK.min(per_sector - c * CHUNK);
                    let mut acc = Acc::new();
                    for _ in 0..n {
                        let mut xi = sectors.sample(j, &mut rng);
                        let mut eta = sectors.sample(j, &mut rng);
                        if norm(xi) < norm(eta) {
                            std::mem::swap(&mut xi, &mut eta);
                        }
                        let Ok(h) = hessian_f_eta(xi, eta, alpha, d) else {
                            continue;
                        };
                        let (lo, hi) = sym_eigenvalues(&h, d);
                        acc.min_eig = acc.min_eig.min(lo);
                        acc.max_eig = acc.max_eig.max(hi);

                        let y = if d == 1 {
                            [if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0]
                        } else {
                            let phi = rng.random_range(0.0..std::f64::consts::TAU);
                            [phi.cos(), phi.sin()]
                        };
                        let s = [xi[0] + eta[0], xi[1] + eta[1]];
                        let diff = cos2(xi, y) - cos2(s, y);
                        let lhs = diff.abs();
                        acc.a1_max = acc.a1_max.max(lhs);
                        if lhs > a1_bound {
                            acc.a1_viol += 1;
                            acc.a1_w.get_or_insert(Witness { xi, eta, y, value: lhs });
                        }
                        let q = 1.0 + (alpha - 2.0) * diff;
                        acc.q_min = acc.q_min.min(q);
                        if q < 0.5 {
                            acc.q_viol += 1;
                            acc.q_w.get_or_insert(Witness { xi, eta, y, value: q });
                        }
                    }
                    acc
                })
                .fold(Acc::new(), Acc::merge)
        })
        .collect();
    let per_sector_min = results.iter().map(|a| a.min_eig).collect();
    let total = results.into_iter().fold(Acc::new(), Acc::merge);
    // c1, c2 are the eigenvalue bounds rescaled to the unit annulus (Hessian is (α-2)-homogeneous)
    let scale = sectors.n_scale.powf(alpha - 2.0);
    HessianScan {
        alpha,
        samples: per_sector * k,
        c1: total.min_eig / scale,
        c2: total.max_eig / scale,
        min_eig: total.min_eig,
        max_eig: total.max_eig,
        per_sector_min,
        a1_max: total.a1_max,
        a1_bound,
        a1_violations: total.a1_viol,
        a1_witness: total.a1_w,
        quad_form_min: total.q_min,
        quad_violations: total.q_viol,
        quad_witness: total.q_w,
    }
}

/// Exact sup over y of the (A.1) left-hand side.
pub fn a1_exact(xi: [f64; 2], eta: [f64; 2]) -> f64 {
    a1_sup(xi, eta)
}
