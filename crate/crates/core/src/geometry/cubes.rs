use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Dyadic cube of side N/r inside the annulus {N <= ‖ξ‖_max < 2N}.
///
/// The cube is Π_i [k_i ℓ, (k_i + 1) ℓ) with ℓ = N/r.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicCube {
    pub d: usize,
    /// log2 N.
    pub scale_exp: i32,
    /// log2 r.
    pub r_exp: u32,
    pub index: [i64; 2],
}

fn log2_exact(x: f64, name: &'static str) -> Result<i32> {
    let e = x.log2();
    if !(x > 0.0) || e.fract() != 0.0 {
        return Err(invalid(name, format!("must be a power of two, got {x}")));
    }
    Ok(e as i32)
}

impl DyadicCube {
    pub fn new(d: usize, n_scale: f64, r: u64, index: &[i64]) -> Result<Self> {
        if d != 1 && d != 2 {
            return Err(Error::UnsupportedDimension(d));
        }
        if index.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: index.len(),
            });
        }
        let scale_exp = log2_exact(n_scale, "N")?;
        if r < 2 || !r.is_power_of_two() {
            return Err(invalid("r", format!("must be a power of two >= 2, got {r}")));
        }
        let cube = Self {
            d,
            scale_exp,
            r_exp: r.trailing_zeros(),
            index: [index[0], *index.get(1).unwrap_or(&0)],
        };
        if !cube.in_annulus() {
            return Err(invalid("index", "cube is not contained in the annulus"));
        }
        Ok(cube)
    }

    pub fn n_scale(&self) -> f64 {
        2f64.powi(self.scale_exp)
    }

    pub fn r(&self) -> u64 {
        1u64 << self.r_exp
    }

    pub fn side(&self) -> f64 {
        self.n_scale() / self.r() as f64
    }

    /// Lebesgue measure ℓ^d.
    pub fn volume(&self) -> f64 {
        self.side().powi(self.d as i32)
    }

    pub fn center(&self) -> [f64; 2] {
        let l = self.side();
        let c = |k: i64| (k as f64 + 0.5) * l;
        if self.d == 1 {
            [c(self.index[0]), 0.0]
        } else {
            [c(self.index[0]), c(self.index[1])]
        }
    }

    /// Lower corner and upper corner.
    pub fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        let l = self.side();
        let lo = [self.index[0] as f64 * l, self.index[1] as f64 * l];
        let hi = [lo[0] + l, if self.d == 2 { lo[1] + l } else { 0.0 }];
        (lo, hi)
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let (lo, hi) = self.bounds();
        (0..self.d).all(|i| p[i] >= lo[i] && p[i] < hi[i])
    }

    fn in_annulus(&self) -> bool {
        let r = self.r() as i64;
        let k = &self.index[..self.d];
        k.iter().all(|&ki| (-2 * r..2 * r).contains(&ki)) && k.iter().any(|&ki| ki >= r || ki < -r)
    }

    /// Index of the k-th dyadic ancestor (side 2^k ℓ).
    pub fn ancestor_index(&self, k: u32) -> [i64; 2] {
        let s = 1i64 << k;
        [self.index[0].div_euclid(s), self.index[1].div_euclid(s)]
    }

    /// Chebyshev distance between the k-th ancestors.
    pub fn ancestor_distance(&self, other: &Self, k: u32) -> i64 {
        let a = self.ancestor_index(k);
        let b = other.ancestor_index(k);
        (0..self.d).map(|i| (a[i] - b[i]).abs()).max().unwrap_or(0)
    }

    pub fn same_family(&self, other: &Self) -> bool {
        self.d == other.d && self.scale_exp == other.scale_exp && self.r_exp == other.r_exp
    }

    /// Closures intersect (same scale): Chebyshev index distance <= 1.
    pub fn adjacent(&self, other: &Self) -> bool {
        self.same_family(other) && self.ancestor_distance(other, 0) <= 1
    }

    /// The cube of the family (N, r) containing `p`, if `p` is in the annulus.
    pub fn containing(d: usize, n_scale: f64, r: u64, p: [f64; 2]) -> Option<Self> {
        let l = n_scale / r as f64;
        let idx: Vec<i64> = (0..d).map(|i| (p[i] / l).floor() as i64).collect();
        Self::new(d, n_scale, r, &idx).ok()
    }
}

/// All dyadic cubes of side N/r inside the annulus A_N.
pub fn enumerate_cubes(d: usize, n_scale: f64, r: u64) -> Result<Vec<DyadicCube>> {
    DyadicCube::new(d, n_scale, r, &vec![r as i64; d])?;
    let r_i = r as i64;
    let scale_exp = log2_exact(n_scale, "N")?;
    let r_exp = r.trailing_zeros();
    let mut out = Vec::new();
    let range = -2 * r_i..2 * r_i;
    let outer = |k: i64| k >= r_i || k < -r_i;
    if d == 1 {
        for a in range.clone() {
            if outer(a) {
                out.push(DyadicCube { d, scale_exp, r_exp, index: [a, 0] });
            }
        }
    } else {
        for a in range.clone() {
            for b in range.clone() {
                if outer(a) || outer(b) {
                    out.push(DyadicCube { d, scale_exp, r_exp, index: [a, b] });
                }
            }
        }
    }
    Ok(out)
}

/// Related pair: ancestors non-adjacent below generation N_w, adjacent at N_w.
pub fn whitney_related(a: &DyadicCube, b: &DyadicCube, n_whitney: u32) -> bool {
    if !a.same_family(b) {
        return false;
    }
    (0..n_whitney).all(|k| a.ancestor_distance(b, k) > 1) && a.ancestor_distance(b, n_whitney) <= 1
}
