use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default Whitney depth N_{d,α}.
pub const DEFAULT_N_WHITNEY: u32 = 4;
/// Upper cap applied to the scanned angle budget.
pub const THETA_BAR_CAP: f64 = PI / 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionConfig {
    pub d: usize,
    pub n_whitney: u32,
    pub k_sectors: usize,
    pub theta_bar: f64,
    pub theta_sector: f64,
}

fn sector_angle(d: usize, k: usize) -> Result<f64> {
    match d {
        1 if k == 2 => Ok(0.0),
        1 => Err(invalid("k_sectors", "d = 1 has exactly two sectors (the half-lines)")),
        2 if k >= 1 => Ok(TAU / k as f64),
        2 => Err(invalid("k_sectors", "must be positive")),
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

fn whitney_angle(d: usize, n_whitney: u32) -> f64 {
    ((d as f64).powf(-0.5) * 2f64.powi(-(n_whitney as i32))).atan()
}

impl DecompositionConfig {
    /// Rejects configurations with arctan(d^{-1/2} 2^{-N_w}) + θ_sector > θ̄.
    pub fn new(d: usize, n_whitney: u32, k_sectors: usize, theta_bar: f64) -> Result<Self> {
        if n_whitney == 0 {
            return Err(invalid("n_whitney", "must be positive"));
        }
        if !(theta_bar > 0.0) {
            return Err(invalid("theta_bar", "must be positive"));
        }
        let theta_sector = sector_angle(d, k_sectors)?;
        let lhs = whitney_angle(d, n_whitney) + theta_sector;
        if lhs > theta_bar {
            return Err(Error::AngleCondition { lhs, theta_bar });
        }
        Ok(Self {
            d,
            n_whitney,
            k_sectors,
            theta_bar,
            theta_sector,
        })
    }

    /// Smallest admissible sector count for the given depth and angle budget.
    pub fn minimal(d: usize, n_whitney: u32, theta_bar: f64) -> Result<Self> {
        if d == 1 {
            return Self::new(1, n_whitney, 2, theta_bar);
        }
        let room = theta_bar - whitney_angle(d, n_whitney);
        if !(room > 0.0) {
            return Err(Error::AngleCondition {
                lhs: whitney_angle(d, n_whitney),
                theta_bar,
            });
        }
        let mut k = 1usize;
        loop {
            match Self::new(d, n_whitney, k, theta_bar) {
                Ok(c) => return Ok(c),
                Err(Error::AngleCondition { .. }) if k < 1 << 24 => k += 1,
                Err(e) => return Err(e),
            }
        }
    }

    /// Default configuration: depth 4 and θ̄ from the (A.1) scan, capped at π/8.
    pub fn for_alpha(d: usize, alpha: f64, seed: u64) -> Result<Self> {
        let theta_bar = theta_bar_scan(alpha, d, 4000, seed).min(THETA_BAR_CAP);
        Self::minimal(d, DEFAULT_N_WHITNEY, theta_bar)
    }
}

/// Angle between two vectors in [0, π].
pub fn angle_between(a: [f64; 2], b: [f64; 2]) -> f64 {
    let cross = a[0] * b[1] - a[1] * b[0];
    let dot = a[0] * b[0] + a[1] * b[1];
    cross.abs().atan2(dot)
}

/// sup over unit y of |cos²θ(ξ,y) - cos²θ(ξ+η,y)|, which equals sin∠(ξ, ξ+η).
pub fn a1_sup(xi: [f64; 2], eta: [f64; 2]) -> f64 {
    angle_between(xi, [xi[0] + eta[0], xi[1] + eta[1]]).sin()
}

/// Uniform-ish point of A_1 on a ray of angle `phi`, with area-weighted radius.
pub(crate) fn sample_on_ray(rng: &mut ChaCha8Rng, phi: f64) -> [f64; 2] {
    let (s, c) = phi.sin_cos();
    let m = c.abs().max(s.abs());
    let (lo, hi) = (1.0 / m, 2.0 / m);
    let rho = rng.random_range(lo * lo..hi * hi).sqrt();
    [rho * c, rho * s]
}

/// Largest angle θ such that all sampled pairs in A_1 with θ(ξ,η) <= θ, |ξ| >= |η|
/// satisfy sin∠(ξ, ξ+η) <= 1/(2α-4). Returns π when the bound is vacuous.
pub fn theta_bar_scan(alpha: f64, d: usize, samples: usize, seed: u64) -> f64 {
    if alpha <= 2.5 || d == 1 {
        // 1/(2α-4) >= 1 (or d = 1, where the angle is 0 or π)
        return PI;
    }
    let bound = 1.0 / (2.0 * alpha - 4.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<([f64; 2], f64)> = (0..samples)
        .map(|_| {
            let phi = rng.random_range(0.0..TAU);
            let ratio = rng.random_range(0.0f64..1.0);
            (sample_on_ray(&mut rng, phi), ratio)
        })
        .collect();
    let violates = |theta: f64| {
        pts.iter().any(|&(xi, ratio)| {
            let r = xi[0].hypot(xi[1]);
            // η at angle θ from ξ, with |η| between 1 and |ξ| (the A_1 inner radius is 1)
            let phi = xi[1].atan2(xi[0]) + theta;
            let len = 1.0 + ratio.sqrt() * (r - 1.0);
            let eta = [len * phi.cos(), len * phi.sin()];
            a1_sup(xi, eta) > bound
        })
    };
    // the violation set is not monotone in θ (anti-parallel pairs are harmless), so sweep
    // upward to the first violating angle and refine by bisection
    let steps = 2000;
    let dt = PI / steps as f64;
    let Some(first) = (1..=steps).find(|&k| violates(k as f64 * dt)) else {
        return PI;
    };
    let (mut lo, mut hi) = ((first - 1) as f64 * dt, first as f64 * dt);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if violates(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub index: usize,
    /// Angular interval [start, end) for d = 2; sign (±1) for d = 1.
    pub start: f64,
    pub end: f64,
}

impl Sector {
    pub fn opening(&self) -> f64 {
        self.end - self.start
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorDecomposition {
    pub config: DecompositionConfig,
    pub n_scale: f64,
    pub sectors: Vec<Sector>,
}

impl SectorDecomposition {
    pub fn sector_of(&self, p: [f64; 2]) -> usize {
        if self.config.d == 1 {
            return if p[0] >= 0.0 { 0 } else { 1 };
        }
        let phi = p[1].atan2(p[0]).rem_euclid(TAU);
        let k = self.sectors.len();
        ((phi / TAU * k as f64).floor() as usize).min(k - 1)
    }

    /// Whether the closed cube [lo, hi] meets sector `j` (the cube must avoid the origin).
    pub fn meets_box(&self, j: usize, lo: [f64; 2], hi: [f64; 2]) -> bool {
        if self.config.d == 1 {
            return if j == 0 { hi[0] > 0.0 } else { lo[0] < 0.0 };
        }
        let s = &self.sectors[j];
        let mid = 0.5 * (s.start + s.end);
        // corner angles relative to the sector bisector; the cube's angular span is their hull
        let rel = |x: f64, y: f64| {
            let a = y.atan2(x) - mid;
            (a + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI
        };
        let corners = [rel(lo[0], lo[1]), rel(hi[0], lo[1]), rel(lo[0], hi[1]), rel(hi[0], hi[1])];
        let a = corners.iter().copied().fold(f64::INFINITY, f64::min);
        let b = corners.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let half = 0.5 * s.opening();
        b - a < std::f64::consts::PI && a <= half && b >= -half
    }

    /// A random point of A_N in sector `j`.
    pub fn sample(&self, j: usize, rng: &mut ChaCha8Rng) -> [f64; 2] {
        let n = self.n_scale;
        if self.config.d == 1 {
            let x = rng.random_range(n..2.0 * n);
            return [if j == 0 { x } else { -x }, 0.0];
        }
        let s = &self.sectors[j];
        let phi = rng.random_range(s.start..s.end);
        let p = sample_on_ray(rng, phi);
        [p[0] * n, p[1] * n]
    }

    /// Largest sampled pairwise angle within sector `j`.
    pub fn max_pairwise_angle_sampled(&self, j: usize, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<_> = (0..samples).map(|_| self.sample(j, &mut rng)).collect();
        let s = &self.sectors[j];
        // wedge corners are the extreme directions
        let mut best: f64 = 0.0;
        for p in &pts {
            for q in [[s.start.cos(), s.start.sin()], [s.end.cos(), s.end.sin()]] {
                if self.config.d == 2 {
                    best = best.max(angle_between(*p, q).min(s.opening()));
                }
            }
        }
        for w in pts.windows(2) {
            best = best.max(angle_between(w[0], w[1]));
        }
        best
    }
}

/// K equal wedges (d = 2) or the two half-lines (d = 1) of A_N.
pub fn build_sectors(n_scale: f64, config: &DecompositionConfig) -> SectorDecomposition {
    let sectors = if config.d == 1 {
        vec![
            Sector { index: 0, start: 1.0, end: 1.0 },
            Sector { index: 1, start: -1.0, end: -1.0 },
        ]
    } else {
        let k = config.k_sectors;
        (0..k)
            .map(|j| Sector {
                index: j,
                start: TAU * j as f64 / k as f64,
                end: TAU * (j + 1) as f64 / k as f64,
            })
            .collect()
    };
    SectorDecomposition {
        config: *config,
        n_scale,
        sectors,
    }
}
