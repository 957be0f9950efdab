use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::summation::pairwise_sum;

use super::profile::RadialProfile;

/// Quadrature resolution: Simpson intervals in |ζ| and in the level radius λ = (τ/2)^{1/α},
/// trapezoid intervals in the curve angle over a quarter turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvQuadrature {
    pub n_rho: usize,
    pub n_level: usize,
    pub n_angle: usize,
}

impl Default for ConvQuadrature {
    fn default() -> Self {
        Self {
            n_rho: 64,
            n_level: 64,
            n_angle: 64,
        }
    }
}

impl ConvQuadrature {
    pub fn doubled(&self) -> Self {
        Self {
            n_rho: 2 * self.n_rho,
            n_level: 2 * self.n_level,
            n_angle: 2 * self.n_angle,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_rho < 2 || self.n_level < 2 || self.n_angle < 2 || self.n_rho % 2 == 1 || self.n_level % 2 == 1 {
            return Err(invalid("quadrature", "need even Simpson counts and at least two angle steps"));
        }
        Ok(())
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha >= 2.0) || !alpha.is_finite() {
        return Err(invalid("alpha", format!("must be >= 2, got {alpha}")));
    }
    Ok(())
}

/// Ψ(y) = |y|^α + |ζ-y|^α and its derivative along y = ζ/2 + r e.
fn psi_along(alpha: f64, zeta: [f64; 2], e: [f64; 2], r: f64) -> (f64, f64, f64, f64) {
    let y = [0.5 * zeta[0] + r * e[0], 0.5 * zeta[1] + r * e[1]];
    let z = [zeta[0] - y[0], zeta[1] - y[1]];
    let a2 = y[0] * y[0] + y[1] * y[1];
    let b2 = z[0] * z[0] + z[1] * z[1];
    let half = 0.5 * alpha;
    // |y|^{α-2}, |ζ-y|^{α-2}
    let pa = if a2 > 0.0 { (( half - 1.0) * a2.ln()).exp() } else if alpha == 2.0 { 1.0 } else { 0.0 };
    let pb = if b2 > 0.0 { ((half - 1.0) * b2.ln()).exp() } else if alpha == 2.0 { 1.0 } else { 0.0 };
    let psi = pa * a2 + pb * b2;
    // d|y|/dr = y·e/|y|, d|ζ-y|/dr = -z·e/|z|
    let ye = y[0] * e[0] + y[1] * e[1];
    let ze = z[0] * e[0] + z[1] * e[1];
    let dpsi = alpha * (pa * ye - pb * ze);
    (psi, dpsi, a2.sqrt(), b2.sqrt())
}

/// Point on the ray ζ/2 + r e where Ψ = τ, starting Newton at `guess` in (0, λ].
///
/// Ψ is convex along the ray with its minimum at r = 0: a Newton step from the left of
/// the root lands on its right, and from there the iteration decreases monotonically.
fn level_radius(alpha: f64, zeta: [f64; 2], e: [f64; 2], tau: f64, lambda: f64, guess: f64) -> f64 {
    let mut r = guess.clamp(1e-300, lambda);
    for _ in 0..100 {
        let (psi, dpsi, _, _) = psi_along(alpha, zeta, e, r);
        if !(dpsi > 0.0) {
            break;
        }
        let next = (r - (psi - tau) / dpsi).clamp(0.0, lambda);
        if (r - next).abs() <= 1e-15 * lambda {
            return next;
        }
        r = next;
    }
    r
}

/// (fσ_α * fσ_α)(ζ, τ) for a radial profile.
///
/// The delta is resolved in polar coordinates about ζ/2: each ray meets the level curve
/// once, and the co-area factor becomes r/∂_rΨ, which stays bounded at the bottom of the
/// well. The angle integral is a trapezoid rule with `n_angle` steps per quarter turn.
/// At τ <= τ_min(ζ) the level set is empty or a point and the value is 0; the jump there
/// is handled by [`sigma_convolution`], which samples the upper limit.
pub fn sigma_convolution_at(f: &RadialProfile, alpha: f64, zeta: [f64; 2], tau: f64, n_angle: usize) -> Result<f64> {
    check_alpha(alpha)?;
    if n_angle < 2 {
        return Err(invalid("n_angle", "need at least two steps"));
    }
    let rho = zeta[0].hypot(zeta[1]);
    let tau_min = 2.0 * (0.5 * rho).powf(alpha);
    if !(tau > tau_min) {
        return Ok(0.0);
    }
    let lambda = (0.5 * tau).powf(1.0 / alpha);
    let w = 0.25 * (alpha - 2.0);
    // frame with u along ζ (any frame when ζ = 0)
    let u = if rho > 0.0 { [zeta[0] / rho, zeta[1] / rho] } else { [1.0, 0.0] };
    let v = [-u[1], u[0]];
    // reflections across ζ and y ↦ ζ - y reduce the full turn to a quarter
    let n = n_angle;
    let dphi = 0.5 * PI / n as f64;
    let mut guess = lambda;
    let terms: Vec<f64> = (0..=n)
        .map(|k| {
            let (s, c) = (k as f64 * dphi).sin_cos();
            let e = [c * u[0] + s * v[0], c * u[1] + s * v[1]];
            let r = level_radius(alpha, zeta, e, tau, lambda, guess);
            guess = r;
            let (_, dpsi, a, b) = psi_along(alpha, zeta, e, r);
            if !(dpsi > 0.0) {
                return 0.0;
            }
            let fa = f.eval(a);
            let fb = f.eval(b);
            if fa == 0.0 || fb == 0.0 {
                return 0.0;
            }
            let end = if k == 0 || k == n { 0.5 } else { 1.0 };
            4.0 * end * fa * fb * (a * b).powf(w) * r / dpsi * dphi
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Convolution sampled on the (|ζ|, λ) quadrature nodes; τ = 2λ^α.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionField {
    pub alpha: f64,
    pub rho: Vec<f64>,
    /// Row i holds τ nodes for rho[i].
    pub tau: Vec<Vec<f64>>,
    pub values: Vec<Vec<f64>>,
}

fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    (0..=n)
        .map(|k| {
            let c = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

/// Output nodes: |ζ| on [0, 2R], λ on [|ζ|/2, R] per row.
pub fn sigma_convolution(f: &RadialProfile, alpha: f64, quad: ConvQuadrature) -> Result<ConvolutionField> {
    check_alpha(alpha)?;
    quad.validate()?;
    let big_r = f.radius;
    let rho: Vec<f64> = (0..=quad.n_rho).map(|i| 2.0 * big_r * i as f64 / quad.n_rho as f64).collect();
    let rows: Vec<Result<(Vec<f64>, Vec<f64>)>> = rho
        .par_iter()
        .map(|&p| {
            let lo = 0.5 * p;
            // g jumps at τ_min; the first node takes the limit from above
            let span = big_r - lo;
            let taus: Vec<f64> = (0..=quad.n_level)
                .map(|j| {
                    let lam = if j == 0 {
                        lo + 1e-9 * span
                    } else {
                        lo + span * j as f64 / quad.n_level as f64
                    };
                    2.0 * lam.powf(alpha)
                })
                .collect();
            if p == 0.0 {
                // carries zero weight in ∫ 2π|ζ| d|ζ|, and g is unbounded at τ -> 0 for α > 2
                return Ok((taus, vec![0.0; quad.n_level + 1]));
            }
            let vals = taus
                .iter()
                .map(|&t| sigma_convolution_at(f, alpha, [p, 0.0], t, quad.n_angle))
                .collect::<Result<Vec<f64>>>()?;
            Ok((taus, vals))
        })
        .collect();
    let mut tau = Vec::with_capacity(rows.len());
    let mut values = Vec::with_capacity(rows.len());
    for r in rows {
        let (t, v) = r?;
        tau.push(t);
        values.push(v);
    }
    Ok(ConvolutionField { alpha, rho, tau, values })
}

/// ‖fσ*fσ‖²_{L²(R³)} = ∫ 2π|ζ| d|ζ| ∫ g² dτ, Simpson in |ζ| and in λ.
fn conv_l2_squared(f: &RadialProfile, alpha: f64, quad: ConvQuadrature) -> Result<f64> {
    let field = sigma_convolution(f, alpha, quad)?;
    let big_r = f.radius;
    let w_rho = simpson_weights(quad.n_rho, 2.0 * big_r / quad.n_rho as f64);
    let mut terms = Vec::with_capacity(field.rho.len());
    for (i, &p) in field.rho.iter().enumerate() {
        let lo = 0.5 * p;
        let h = (big_r - lo) / quad.n_level as f64;
        if h <= 0.0 {
            terms.push(0.0);
            continue;
        }
        let w_l = simpson_weights(quad.n_level, h);
        let inner: Vec<f64> = (0..=quad.n_level)
            .map(|j| {
                let lam = lo + h * j as f64;
                // dτ = 2α λ^{α-1} dλ
                let jac = 2.0 * alpha * lam.powf(alpha - 1.0);
                w_l[j] * field.values[i][j].powi(2) * jac
            })
            .collect();
        terms.push(w_rho[i] * 2.0 * PI * p * pairwise_sum(&inner));
    }
    Ok(pairwise_sum(&terms))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QReport {
    pub alpha: f64,
    /// Q(f)⁴ = ‖fσ*fσ‖²/‖f‖⁴ at the doubled resolution.
    pub q4: f64,
    /// Q(f)⁴ at the base resolution.
    pub q4_coarse: f64,
    /// |fine - coarse|.
    pub quad_error: f64,
    pub quadrature: ConvQuadrature,
}

impl QReport {
    pub fn q(&self) -> f64 {
        self.q4.powf(0.25)
    }
}

/// Q(f)⁴ on one quadrature resolution.
pub fn q4_once(f: &RadialProfile, alpha: f64, quad: ConvQuadrature) -> Result<f64> {
    let n = f.l2_norm();
    if n == 0.0 {
        return Err(Error::ZeroFunction);
    }
    Ok(conv_l2_squared(f, alpha, quad)? / n.powi(4))
}

/// Trial value Q(f) with Q(f)² = ‖fσ_α*fσ_α‖₂/‖f‖₂², evaluated at `quad` and its doubling.
pub fn q_trial(f: &RadialProfile, alpha: f64, quad: ConvQuadrature) -> Result<QReport> {
    let coarse = q4_once(f, alpha, quad)?;
    let fine = q4_once(f, alpha, quad.doubled())?;
    Ok(QReport {
        alpha,
        q4: fine,
        q4_coarse: coarse,
        quad_error: (fine - coarse).abs(),
        quadrature: quad,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketReport {
    pub alpha: f64,
    /// π/(α√(α-1)).
    pub lower: f64,
    /// π/α.
    pub upper: f64,
    pub q4: f64,
    pub quad_error: f64,
    pub margin: f64,
    /// Margin beyond three error bars (never at α = 2, where the bracket closes).
    pub lower_witnessed: bool,
    /// Q⁴ above π/α + 3·quad_error.
    pub upper_violated: bool,
}

pub fn bracket_check(alpha: f64, q4: f64, quad_error: f64) -> BracketReport {
    let lower = PI / (alpha * (alpha - 1.0).sqrt());
    let upper = PI / alpha;
    let margin = q4 - lower;
    BracketReport {
        alpha,
        lower,
        upper,
        q4,
        quad_error,
        margin,
        lower_witnessed: alpha > 2.0 && margin > 3.0 * quad_error,
        upper_violated: q4 > upper + 3.0 * quad_error,
    }
}

/// Angle-only refinement: relative change of Q⁴ when the curve step is halved.
pub fn angle_refinement(f: &RadialProfile, alpha: f64, quad: ConvQuadrature) -> Result<f64> {
    let a = q4_once(f, alpha, quad)?;
    let b = q4_once(
        f,
        alpha,
        ConvQuadrature {
            n_angle: 2 * quad.n_angle,
            ..quad
        },
    )?;
    Ok((b - a).abs() / b)
}

