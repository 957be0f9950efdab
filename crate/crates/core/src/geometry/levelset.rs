use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::params::ExtensionParams;
use crate::propagator::binomial_remainder;

/// ((x+1)² + w^{2-α} - 2(x+1)w^{1-α/2} + y²) / (x²+y²) with w = (x+1)² + y²,
/// evaluated as ((x - expm1((1-α/2) log1p(2x+x²+y²)))² + y²) / (x²+y²).
pub fn levelset_ratio_at(alpha: f64, x: f64, y: f64) -> f64 {
    let rho2 = x * x + y * y;
    let v = 2.0 * x + rho2;
    let p1 = ((1.0 - 0.5 * alpha) * v.ln_1p()).exp_m1();
    ((x - p1).powi(2) + y * y) / rho2
}

/// Radius of the neighbourhood used in the proof: min{3/(α-2), 1/5}.
pub fn levelset_radius(alpha: f64) -> f64 {
    if alpha > 2.0 {
        (3.0 / (alpha - 2.0)).min(0.2)
    } else {
        0.2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub alpha: f64,
    pub samples: usize,
    pub min: f64,
    pub max: f64,
    pub argmin: [f64; 2],
    pub argmax: [f64; 2],
    pub lower_bound: f64,
    pub upper_bound: f64,
}

impl RatioReport {
    pub fn within_bounds(&self) -> bool {
        self.min >= self.lower_bound && self.max <= self.upper_bound
    }
}

/// Ratio range over log-uniform radii in [1e-6 R, R] and uniform angles.
pub fn levelset_ratio(alpha: f64, samples: usize, seed: u64) -> RatioReport {
    let big = levelset_radius(alpha);
    let (lo, hi) = ((1e-6 * big).ln(), big.ln());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = RatioReport {
        alpha,
        samples,
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        argmin: [0.0; 2],
        argmax: [0.0; 2],
        lower_bound: 0.5,
        upper_bound: 3.0 * alpha,
    };
    for _ in 0..samples {
        let rho = rng.random_range(lo..=hi).exp();
        let phi = rng.random_range(0.0..TAU);
        let (x, y) = (rho * phi.cos(), rho * phi.sin());
        let v = levelset_ratio_at(alpha, x, y);
        if v < rep.min {
            rep.min = v;
            rep.argmin = [x, y];
        }
        if v > rep.max {
            rep.max = v;
            rep.argmax = [x, y];
        }
    }
    rep
}

/// Φ_η(ξ) = |ξ+η|^α - α|η|^{α-2} η·ξ - |η|^α, which is convex with minimum 0 at ξ = 0.
pub fn level_function(xi: [f64; 2], eta: [f64; 2], alpha: f64) -> f64 {
    let e = eta[0].hypot(eta[1]);
    let t = [xi[0] / e, xi[1] / e];
    let s2 = t[0] * t[0] + t[1] * t[1];
    let u = 2.0 * (t[0] * eta[0] + t[1] * eta[1]) / e + s2;
    e.powf(alpha) * (binomial_remainder(alpha / 2.0, u) + 0.5 * alpha * s2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparabilityReport {
    pub alpha: f64,
    pub eta_abs: f64,
    pub xi_abs: f64,
    pub directions: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub max_residual: f64,
    /// ratios |ξ'|/|ξ| for each direction
    pub ratios: Vec<f64>,
}

/// Solves Φ_η(ξ') = Φ_η(ξ) along rays from the origin and reports |ξ'|/|ξ|.
/// The ray through ξ itself is included, so ratio 1 always appears.
pub fn levelset_comparability(
    alpha: f64,
    eta: [f64; 2],
    xi: [f64; 2],
    d: usize,
    directions: usize,
) -> Result<ComparabilityReport> {
    let e = eta[0].hypot(eta[1]);
    let r = xi[0].hypot(xi[1]);
    if e < 100.0 {
        return Err(invalid("eta", "|eta| must be at least 100"));
    }
    if !(r > 0.0) || r > e / 5.0 {
        return Err(invalid("xi", "need 0 < |xi| <= |eta|/5"));
    }
    let level = level_function(xi, eta, alpha);
    let base = xi[1].atan2(xi[0]);
    let dirs: Vec<[f64; 2]> = if d == 1 {
        vec![[xi[0].signum(), 0.0], [-xi[0].signum(), 0.0]]
    } else {
        (0..directions.max(1))
            .map(|k| {
                let a = base + TAU * k as f64 / directions.max(1) as f64;
                [a.cos(), a.sin()]
            })
            .collect()
    };
    let mut ratios = Vec::with_capacity(dirs.len());
    let mut max_residual: f64 = 0.0;
    for w in dirs {
        let g = |t: f64| level_function([t * w[0], t * w[1]], eta, alpha) - level;
        let mut hi = r;
        let mut steps = 0;
        while g(hi) < 0.0 {
            hi *= 2.0;
            steps += 1;
            if steps > 60 {
                return Err(Error::RootFinding { direction: w.to_vec() });
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        let res = g(t).abs() / level;
        if !res.is_finite() || res > 1e-10 {
            return Err(Error::RootFinding { direction: w.to_vec() });
        }
        max_residual = max_residual.max(res);
        ratios.push(t / r);
    }
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(ComparabilityReport {
        alpha,
        eta_abs: e,
        xi_abs: r,
        directions: ratios.len(),
        min_ratio,
        max_ratio,
        max_residual,
        ratios,
    })
}

/// ψ_η(ξ) = |η|^{(α-2)/q0} |ξ|^{1/2} |ξ+η|^{-(α-2)/q0}.
pub fn psi_eta(xi: [f64; 2], eta: [f64; 2], params: &ExtensionParams) -> Result<f64> {
    let s = (xi[0] + eta[0]).hypot(xi[1] + eta[1]);
    if s == 0.0 {
        return Err(Error::Pole);
    }
    let w = params.weight_exponent();
    let e = eta[0].hypot(eta[1]);
    Ok((e / s).powf(w) * xi[0].hypot(xi[1]).sqrt())
}

/// Largest 1/ψ_η over |ξ| in [xi_lo, xi_hi] (radial ladder × directions).
pub fn psi_reciprocal_max(
    eta: [f64; 2],
    params: &ExtensionParams,
    xi_lo: f64,
    xi_hi: f64,
    radii: usize,
    directions: usize,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let nd = if params.d == 1 { 2 } else { directions.max(1) };
    for i in 0..radii.max(1) {
        let rad = if radii > 1 {
            xi_lo + (xi_hi - xi_lo) * i as f64 / (radii - 1) as f64
        } else {
            xi_lo
        };
        for k in 0..nd {
            let xi = if params.d == 1 {
                [if k == 0 { rad } else { -rad }, 0.0]
            } else {
                let a = TAU * k as f64 / nd as f64;
                [rad * a.cos(), rad * a.sin()]
            };
            worst = worst.max(1.0 / psi_eta(xi, eta, params)?);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_is_one_at_alpha_two() {
        let rep = levelset_ratio(2.0, 1000, 1);
        assert!((rep.min - 1.0).abs() < 1e-12 && (rep.max - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ratio_matches_direct_evaluation() {
        let direct = (1.21 + 1.21f64.powi(-2) - 2.2 / 1.21) / 0.01;
        assert!((levelset_ratio_at(4.0, 0.1, 0.0) - direct).abs() < 1e-9 * direct);
    }

    #[test]
    fn level_function_matches_naive_form() {
        let eta: [f64; 2] = [150.0, -40.0];
        let xi: [f64; 2] = [12.0, 7.0];
        let a = 3.0;
        let s = (xi[0] + eta[0]).hypot(xi[1] + eta[1]);
        let e: f64 = eta[0].hypot(eta[1]);
        let naive = s.powf(a) - a * e.powf(a - 2.0) * (eta[0] * xi[0] + eta[1] * xi[1]) - e.powf(a);
        assert!((level_function(xi, eta, a) - naive).abs() < 1e-8 * naive.abs());
    }

    #[test]
    fn comparability_contains_identity_ratio() {
        let rep = levelset_comparability(3.0, [200.0, 0.0], [12.0, 16.0], 2, 64).unwrap();
        assert!((rep.ratios[0] - 1.0).abs() < 1e-12);
        assert!(rep.max_residual < 1e-10);
        let two = levelset_comparability(2.0, [200.0, 0.0], [12.0, 16.0], 2, 16).unwrap();
        assert!((two.min_ratio - 1.0).abs() < 1e-12 && (two.max_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn psi_basic_values() {
        let p = ExtensionParams::new(2, 3.0).unwrap();
        assert_eq!(psi_eta([0.0, 0.0], [200.0, 0.0], &p).unwrap(), 0.0);
        assert_eq!(psi_eta([-200.0, 0.0], [200.0, 0.0], &p), Err(Error::Pole));
        let p2 = ExtensionParams::new(2, 2.0).unwrap();
        assert!((psi_eta([9.0, 0.0], [-30.0, 1.0], &p2).unwrap() - 3.0).abs() < 1e-15);
    }
}
