use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::FrequencyGrid;
use crate::trial::TrialFunction;

/// Finite-dimensional trial families searched by the optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrialFamily {
    /// exp(-(|ξ|-c)²/(2w²)) + exp(-(|ξ|+c)²/(2w²)) with parameters (ln(w/s0), c/s0).
    /// The mirrored term keeps the profile smooth at ξ = 0.
    GaussianParams,
    /// Σ c_k h_k(ξ/s0), Hermite functions ordered by total degree.
    HermiteCoeffs,
    /// Nonnegative monotone-cubic interpolant of p_k² at equispaced knots in |ξ|.
    RadialSpline,
}

impl TrialFamily {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "gaussian-params" => Ok(Self::GaussianParams),
            "hermite-coeffs" => Ok(Self::HermiteCoeffs),
            "radial-spline" => Ok(Self::RadialSpline),
            other => Err(invalid("family", format!("unknown family `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::GaussianParams => "gaussian-params",
            Self::HermiteCoeffs => "hermite-coeffs",
            Self::RadialSpline => "radial-spline",
        }
    }

    /// Number of free parameters; the Gaussian family always has two.
    pub fn dimension(&self, dof: usize) -> usize {
        match self {
            Self::GaussianParams => 2,
            _ => dof,
        }
    }

    /// Coefficient families are scale invariant and live on the unit sphere.
    pub fn on_sphere(&self) -> bool {
        !matches!(self, Self::GaussianParams)
    }
}

/// Builds the family member with parameters `p` on `grid`; s0 is the base width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyBuilder {
    pub family: TrialFamily,
    pub grid: FrequencyGrid,
    pub base_width: f64,
    /// Outer knot of the radial spline.
    pub spline_radius: f64,
}

impl FamilyBuilder {
    /// Base width Ξ/5, spline radius 0.8Ξ.
    pub fn new(family: TrialFamily, grid: FrequencyGrid) -> Self {
        Self {
            family,
            grid,
            base_width: grid.xi_max / 5.0,
            spline_radius: 0.8 * grid.xi_max,
        }
    }

    pub fn build(&self, p: &[f64]) -> Result<TrialFunction> {
        match self.family {
            TrialFamily::GaussianParams => self.gaussian(p),
            TrialFamily::HermiteCoeffs => self.hermite(p),
            TrialFamily::RadialSpline => {
                let s = RadialSpline::from_params(self.spline_radius, p)?;
                TrialFunction::from_fn(self.grid, |x| Complex64::new(s.eval(x[0].hypot(x[1])), 0.0))
            }
        }
    }

    fn gaussian(&self, p: &[f64]) -> Result<TrialFunction> {
        if p.len() != 2 {
            return Err(invalid("params", "gaussian family takes (ln width, center)"));
        }
        let w = self.base_width * p[0].exp();
        let c = self.base_width * p[1];
        if !(w >= 2.0 * self.grid.spacing()) || c.abs() + 5.0 * w > self.grid.xi_max * (1.0 + 1e-12) {
            return Err(invalid("params", format!("width {w} / center {c} not representable on the grid")));
        }
        let s2 = 2.0 * w * w;
        TrialFunction::from_fn(self.grid, |x| {
            let r = x[0].hypot(x[1]);
            Complex64::new((-(r - c).powi(2) / s2).exp() + (-(r + c).powi(2) / s2).exp(), 0.0)
        })
    }

    fn hermite(&self, p: &[f64]) -> Result<TrialFunction> {
        let modes = hermite_modes(self.grid.d, p.len());
        let s0 = self.base_width;
        let kmax = modes.iter().map(|m| m[0].max(m[1])).max().unwrap_or(0);
        TrialFunction::from_fn(self.grid, |x| {
            let h0 = hermite_functions(x[0] / s0, kmax);
            let h1 = if self.grid.d == 2 {
                hermite_functions(x[1] / s0, kmax)
            } else {
                vec![1.0; kmax + 1]
            };
            let v: f64 = modes.iter().zip(p).map(|(m, c)| c * h0[m[0]] * h1[m[1]]).sum();
            Complex64::new(v, 0.0)
        })
    }
}

/// Multi-indices of the first `n` Hermite modes, by total degree.
pub fn hermite_modes(d: usize, n: usize) -> Vec<[usize; 2]> {
    let mut out = Vec::with_capacity(n);
    let mut deg = 0;
    while out.len() < n {
        if d == 1 {
            out.push([deg, 0]);
        } else {
            for a in (0..=deg).rev() {
                if out.len() < n {
                    out.push([a, deg - a]);
                }
            }
        }
        deg += 1;
    }
    out
}

/// Orthonormal Hermite functions h_0..h_kmax at x.
pub fn hermite_functions(x: f64, kmax: usize) -> Vec<f64> {
    let mut h = Vec::with_capacity(kmax + 1);
    h.push(std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp());
    if kmax >= 1 {
        h.push(std::f64::consts::SQRT_2 * x * h[0]);
    }
    for k in 1..kmax {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * h[k] - (kf / (kf + 1.0)).sqrt() * h[k - 1];
        h.push(next);
    }
    h
}

/// Nonnegative radial profile: monotone piecewise-cubic (Fritsch–Carlson) interpolant of
/// the knot values, vanishing at and beyond the outer knot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSpline {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
    slopes: Vec<f64>,
}

impl RadialSpline {
    /// Knots R·k/n (k = 0..n) with values p_k² and a final zero.
    pub fn from_params(radius: f64, p: &[f64]) -> Result<Self> {
        if p.is_empty() || !(radius > 0.0) {
            return Err(invalid("params", "radial spline needs at least one knot and R > 0"));
        }
        let n = p.len();
        let knots: Vec<f64> = (0..=n).map(|k| radius * k as f64 / n as f64).collect();
        let mut values: Vec<f64> = p.iter().map(|v| v * v).collect();
        values.push(0.0);
        Self::new(knots, values)
    }

    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() != values.len() || knots.len() < 2 {
            return Err(invalid("knots", "need matching knots and values, at least two"));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) || values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(invalid("knots", "knots increasing, values finite and nonnegative"));
        }
        let n = knots.len();
        let secant: Vec<f64> = (0..n - 1)
            .map(|k| (values[k + 1] - values[k]) / (knots[k + 1] - knots[k]))
            .collect();
        let mut slopes = vec![0.0; n];
        for k in 1..n - 1 {
            let (a, b) = (secant[k - 1], secant[k]);
            slopes[k] = if a * b <= 0.0 { 0.0 } else { 2.0 * a * b / (a + b) };
        }
        // flat at the origin (smooth radial function) and at the outer knot
        Ok(Self { knots, values, slopes })
    }

    pub fn radius(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r < 0.0 || r >= self.radius() {
            return 0.0;
        }
        let k = match self.knots.partition_point(|&x| x <= r) {
            0 => 0,
            i => i - 1,
        };
        let h = self.knots[k + 1] - self.knots[k];
        let t = (r - self.knots[k]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * self.values[k]
            + (t3 - 2.0 * t2 + t) * h * self.slopes[k]
            + (-2.0 * t3 + 3.0 * t2) * self.values[k + 1]
            + (t3 - t2) * h * self.slopes[k + 1];
        v.max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_orthonormal() {
        // trapezoid on a wide interval is spectrally accurate for these
        let h = 0.01;
        let n = 3000;
        let mut gram = [[0.0; 6]; 6];
        for i in 0..=n {
            let x = -15.0 + i as f64 * h;
            let v = hermite_functions(x, 5);
            for a in 0..6 {
                for b in 0..6 {
                    gram[a][b] += v[a] * v[b] * h;
                }
            }
        }
        for a in 0..6 {
            for b in 0..6 {
                let e = if a == b { 1.0 } else { 0.0 };
                assert!((gram[a][b] - e).abs() < 1e-10, "{a} {b} {}", gram[a][b]);
            }
        }
    }

    #[test]
    fn mode_order() {
        assert_eq!(hermite_modes(1, 3), vec![[0, 0], [1, 0], [2, 0]]);
        assert_eq!(
            hermite_modes(2, 6),
            vec![[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]]
        );
    }

    #[test]
    fn spline_interpolates_and_stays_nonnegative() {
        let s = RadialSpline::from_params(4.0, &[1.0, 0.2, 1.5, 0.01]).unwrap();
        for (k, v) in s.knots.iter().zip(&s.values) {
            assert!((s.eval(*k) - v).abs() < 1e-14 || *k == 4.0);
        }
        for i in 0..=1000 {
            let r = 4.4 * i as f64 / 1000.0;
            assert!(s.eval(r) >= 0.0);
        }
        assert_eq!(s.eval(4.0), 0.0);
        assert!(RadialSpline::new(vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn pure_hermite_mode_is_the_gaussian() {
        let grid = FrequencyGrid::new(2, 8.0, 64).unwrap();
        let b = FamilyBuilder::new(TrialFamily::HermiteCoeffs, grid);
        let f = b.build(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap().normalized().unwrap();
        let g = crate::trial::make_gaussian(grid, &[0.0, 0.0], b.base_width).unwrap();
        for (a, c) in f.values().iter().zip(g.values()) {
            assert!((a - c).norm() < 1e-12);
        }
    }

    #[test]
    fn gaussian_family_domain() {
        let grid = FrequencyGrid::new(1, 16.0, 512).unwrap();
        let b = FamilyBuilder::new(TrialFamily::GaussianParams, grid);
        assert!(b.build(&[0.0, 0.0]).is_ok());
        assert!(b.build(&[0.5, 0.0]).is_err());
        assert!(b.build(&[-5.0, 0.0]).is_err());
        assert_eq!(TrialFamily::parse("radial-spline").unwrap(), TrialFamily::RadialSpline);
        assert!(TrialFamily::parse("splines").is_err());
    }
}
