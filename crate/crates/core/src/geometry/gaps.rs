use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cubes::{enumerate_cubes, whitney_related, DyadicCube};
use super::feta::f_eta;
use super::sectors::SectorDecomposition;
use crate::error::Result;

pub type CubePair = (DyadicCube, DyadicCube);

/// Unordered related pairs (τ, τ') at scale (N, r) of cubes meeting sector `j`.
pub fn related_pairs_in_sector(
    sectors: &SectorDecomposition,
    j: usize,
    r: u64,
    n_whitney: u32,
) -> Result<Vec<CubePair>> {
    let d = sectors.config.d;
    let cubes: Vec<DyadicCube> = enumerate_cubes(d, sectors.n_scale, r)?
        .into_iter()
        .filter(|c| {
            let (lo, hi) = c.bounds();
            sectors.meets_box(j, lo, hi)
        })
        .collect();
    let by_index: HashMap<[i64; 2], &DyadicCube> = cubes.iter().map(|c| (c.index, c)).collect();
    let reach = 1i64 << (n_whitney + 1);
    let ry = if d == 2 { reach } else { 0 };
    let mut pairs = Vec::new();
    for a in &cubes {
        for dx in -reach..=reach {
            for dy in -ry..=ry {
                let key = [a.index[0] + dx, a.index[1] + dy];
                if key <= a.index {
                    continue;
                }
                if let Some(b) = by_index.get(&key) {
                    if whitney_related(a, b, n_whitney) {
                        pairs.push((*a, **b));
                    }
                }
            }
        }
    }
    Ok(pairs)
}

/// Pairs of adjacent (hence unrelated) cubes, used as a negative control.
pub fn adjacent_pairs_in_sector(sectors: &SectorDecomposition, j: usize, r: u64) -> Result<Vec<CubePair>> {
    let cubes: Vec<DyadicCube> = enumerate_cubes(sectors.config.d, sectors.n_scale, r)?
        .into_iter()
        .filter(|c| {
            let (lo, hi) = c.bounds();
            sectors.meets_box(j, lo, hi)
        })
        .collect();
    let mut out = Vec::new();
    for (i, a) in cubes.iter().enumerate() {
        for b in &cubes[i..] {
            if a.adjacent(b) {
                out.push((*a, *b));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapStats {
    pub r: u64,
    pub pairs: usize,
    /// min of r²·F over sampled (ξ, ξ') ∈ τ × τ'
    pub min: f64,
    pub max: f64,
    pub ratio: f64,
}

fn lattice(c: &DyadicCube, per_axis: usize) -> Vec<[f64; 2]> {
    let (lo, hi) = c.bounds();
    let d = c.d;
    let t = |k: usize| k as f64 / (per_axis - 1) as f64;
    let mut out = Vec::new();
    for i in 0..per_axis {
        let x = lo[0] + t(i) * (hi[0] - lo[0]);
        if d == 1 {
            out.push([x, 0.0]);
            continue;
        }
        for k in 0..per_axis {
            out.push([x, lo[1] + t(k) * (hi[1] - lo[1])]);
        }
    }
    out
}

fn uniform_in(c: &DyadicCube, rng: &mut ChaCha8Rng) -> [f64; 2] {
    let (lo, hi) = c.bounds();
    let x = rng.random_range(lo[0]..hi[0]);
    let y = if c.d == 2 { rng.random_range(lo[1]..hi[1]) } else { 0.0 };
    [x, y]
}

/// Range of r²·F_{ξ'}(ξ) over the given pairs: a 3^d lattice in each cube plus
/// `samples_per_pair` uniform draws.
pub fn sumset_gap_stats(pairs: &[CubePair], alpha: f64, samples_per_pair: usize, seed: u64) -> GapStats {
    let r = pairs.first().map_or(0, |p| p.0.r());
    let r2 = (r as f64).powi(2);
    let (min, max) = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            let mut eval = |x: [f64; 2], y: [f64; 2]| {
                let v = r2 * f_eta(x, y, alpha);
                lo = lo.min(v);
                hi = hi.max(v);
            };
            let (la, lb) = (lattice(a, 3), lattice(b, 3));
            for x in &la {
                for y in &lb {
                    eval(*x, *y);
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            for _ in 0..samples_per_pair {
                eval(uniform_in(a, &mut rng), uniform_in(b, &mut rng));
            }
            (lo, hi)
        })
        .reduce(|| (f64::INFINITY, f64::NEG_INFINITY), |x, y| (x.0.min(y.0), x.1.max(y.1)));
    GapStats {
        r,
        pairs: pairs.len(),
        min,
        max,
        ratio: max / min,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterStats {
    /// r(| |ξ₀|-|ξ₀'| | + (|ξ₀||ξ₀'| - ξ₀·ξ₀')^{1/2}) over related pairs: [min, max]
    pub center_low: f64,
    pub center_high: f64,
    /// max over ξ ∈ τ of r·| |ξ|-|ξ₀| | and r·(|ξ||ξ₀| - ξ·ξ₀)^{1/2}
    pub within_cube_radial: f64,
    pub within_cube_angular: f64,
    /// the same two quantities for ξ+ξ' against ξ₀+ξ₀'
    pub sumset_radial: f64,
    pub sumset_angular: f64,
}

fn radial_angular(p: [f64; 2], c: [f64; 2]) -> (f64, f64) {
    let (np, nc) = (p[0].hypot(p[1]), c[0].hypot(c[1]));
    let dot = p[0] * c[0] + p[1] * c[1];
    ((np - nc).abs(), (np * nc - dot).max(0.0).sqrt())
}

pub fn center_estimates(pairs: &[CubePair], samples_per_pair: usize, seed: u64) -> CenterStats {
    let init = CenterStats {
        center_low: f64::INFINITY,
        center_high: 0.0,
        within_cube_radial: 0.0,
        within_cube_angular: 0.0,
        sumset_radial: 0.0,
        sumset_angular: 0.0,
    };
    let merge = |mut a: CenterStats, b: CenterStats| {
        a.center_low = a.center_low.min(b.center_low);
        a.center_high = a.center_high.max(b.center_high);
        a.within_cube_radial = a.within_cube_radial.max(b.within_cube_radial);
        a.within_cube_angular = a.within_cube_angular.max(b.within_cube_angular);
        a.sumset_radial = a.sumset_radial.max(b.sumset_radial);
        a.sumset_angular = a.sumset_angular.max(b.sumset_angular);
        a
    };
    pairs
        .par_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let r = a.r() as f64;
            let (c, c2) = (a.center(), b.center());
            let (rad, ang) = radial_angular(c, c2);
            let mut s = init.clone();
            s.center_low = r * (rad + ang);
            s.center_high = s.center_low;
            let sc = [c[0] + c2[0], c[1] + c2[1]];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut pts: Vec<([f64; 2], [f64; 2])> = lattice(a, 2).into_iter().zip(lattice(b, 2)).collect();
            pts.extend((0..samples_per_pair).map(|_| (uniform_in(a, &mut rng), uniform_in(b, &mut rng))));
            for (x, y) in pts {
                let (r1, a1) = radial_angular(x, c);
                s.within_cube_radial = s.within_cube_radial.max(r * r1);
                s.within_cube_angular = s.within_cube_angular.max(r * a1);
                let (r2, a2) = radial_angular([x[0] + y[0], x[1] + y[1]], sc);
                s.sumset_radial = s.sumset_radial.max(r * r2);
                s.sumset_angular = s.sumset_angular.max(r * a2);
            }
            s
        })
        .reduce(|| init.clone(), merge)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub r: u64,
    pub s: u64,
    pub c2: f64,
    pub c3: f64,
    pub max_count: usize,
    pub min_count: usize,
    pub pairs_r: usize,
    pub pairs_s: usize,
}

/// For each pair at scale r, counts pairs at scale s whose slabs
/// {(ζ, h): ζ ∈ ρ+ρ', c₂/s² <= h - |ζ|^α/2^{α-1} <= c₃/s²} meet the slab of (τ, τ').
pub fn overlap_count(pairs_r: &[CubePair], pairs_s: &[CubePair], c2: f64, c3: f64) -> OverlapReport {
    let r = pairs_r.first().map_or(0, |p| p.0.r());
    let s = pairs_s.first().map_or(0, |p| p.0.r());
    let mut report = OverlapReport {
        r,
        s,
        c2,
        c3,
        max_count: 0,
        min_count: 0,
        pairs_r: pairs_r.len(),
        pairs_s: pairs_s.len(),
    };
    if pairs_r.is_empty() || pairs_s.is_empty() {
        return report;
    }
    let (rf, sf) = (r as f64, s as f64);
    let heights_meet = c3 / (sf * sf) >= c2 / (rf * rf) && c3 / (rf * rf) >= c2 / (sf * sf);
    if !heights_meet {
        return report;
    }
    let d = pairs_r[0].0.d;
    let (lr, ls) = (pairs_r[0].0.side(), pairs_s[0].0.side());
    // sum boxes ρ+ρ' have side 2ℓ_s and center ℓ_s(m+1), m = index sum
    let mut buckets: HashMap<[i64; 2], usize> = HashMap::new();
    for (a, b) in pairs_s {
        let m = [a.index[0] + b.index[0], a.index[1] + b.index[1]];
        *buckets.entry(m).or_default() += 1;
    }
    let reach = lr + ls;
    let counts: Vec<usize> = pairs_r
        .par_iter()
        .map(|(a, b)| {
            let (ca, cb) = (a.center(), b.center());
            let c = [ca[0] + cb[0], ca[1] + cb[1]];
            let range = |x: f64| {
                let lo = ((x - reach) / ls - 1.0).floor() as i64;
                let hi = ((x + reach) / ls - 1.0).ceil() as i64;
                lo..=hi
            };
            let mut n = 0;
            for m0 in range(c[0]) {
                if ((ls * (m0 + 1) as f64) - c[0]).abs() >= reach {
                    continue;
                }
                let ys = if d == 2 { range(c[1]) } else { 0..=0 };
                for m1 in ys {
                    if d == 2 && ((ls * (m1 + 1) as f64) - c[1]).abs() >= reach {
                        continue;
                    }
                    n += buckets.get(&[m0, m1]).copied().unwrap_or(0);
                }
            }
            n
        })
        .collect();
    report.max_count = counts.iter().copied().max().unwrap_or(0);
    report.min_count = counts.iter().copied().min().unwrap_or(0);
    report
}

#[cfg(test)]
mod tests {
    use super::super::sectors::{build_sectors, DecompositionConfig, THETA_BAR_CAP};
    use super::*;

    fn sector(nw: u32) -> SectorDecomposition {
        let c = DecompositionConfig::minimal(2, nw, THETA_BAR_CAP).unwrap();
        build_sectors(1.0, &c)
    }

    #[test]
    fn quadratic_case_is_half_squared_distance() {
        let s = sector(2);
        let pairs = related_pairs_in_sector(&s, 0, 16, 2).unwrap();
        assert!(!pairs.is_empty());
        let (a, b) = pairs[0];
        let st = sumset_gap_stats(&[(a, b)], 2.0, 0, 0);
        // extremes of |ξ-ξ'| over two boxes are attained at lattice corners
        let (la, ha) = a.bounds();
        let (lb, hb) = b.bounds();
        let gap = |i: usize| (lb[i] - ha[i]).max(la[i] - hb[i]).max(0.0);
        let span = |i: usize| (hb[i] - la[i]).abs().max((ha[i] - lb[i]).abs());
        let dmin2 = gap(0).powi(2) + gap(1).powi(2);
        let dmax2 = span(0).powi(2) + span(1).powi(2);
        assert!((st.min - 128.0 * dmin2).abs() < 1e-9, "{st:?}");
        assert!((st.max - 128.0 * dmax2).abs() < 1e-9, "{st:?}");
    }

    #[test]
    fn adjacent_pairs_drive_gap_to_zero() {
        let s = sector(2);
        let adj = adjacent_pairs_in_sector(&s, 0, 16).unwrap();
        let st = sumset_gap_stats(&adj, 3.0, 0, 0);
        assert!(st.min.abs() < 1e-12);
        let rel = related_pairs_in_sector(&s, 0, 16, 2).unwrap();
        assert!(sumset_gap_stats(&rel, 3.0, 4, 0).min > 0.0);
    }

    #[test]
    fn overlap_self_and_incompatible_scales() {
        let s = sector(2);
        let p = related_pairs_in_sector(&s, 0, 16, 2).unwrap();
        let rep = overlap_count(&p, &p, 1.0, 2.0);
        assert!(rep.min_count >= 1);
        let q = related_pairs_in_sector(&s, 0, 64, 2).unwrap();
        assert_eq!(overlap_count(&p[..1], &q, 1.0, 10.0).max_count, 0);
    }
}
