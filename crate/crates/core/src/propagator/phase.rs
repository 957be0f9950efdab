use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::params::ExtensionParams;

/// Large shift frequency ξn with its direction and the limit direction ξ0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftedPhaseContext {
    pub params: ExtensionParams,
    pub xi_n: [f64; 2],
    pub xi_n_abs: f64,
    pub xi_bar: [f64; 2],
    pub xi0: [f64; 2],
}

fn pad(v: &[f64]) -> [f64; 2] {
    [v[0], *v.get(1).unwrap_or(&0.0)]
}

pub(crate) fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

impl ShiftedPhaseContext {
    /// Context with ξ0 = ξn/|ξn|.
    pub fn new(params: ExtensionParams, xi_n: &[f64]) -> Result<Self> {
        Self::with_limit_direction(params, xi_n, xi_n)
    }

    pub fn with_limit_direction(params: ExtensionParams, xi_n: &[f64], xi0: &[f64]) -> Result<Self> {
        if xi_n.len() != params.d || xi0.len() != params.d {
            return Err(invalid("xi_n", "length must equal the dimension"));
        }
        let xn = pad(xi_n);
        let r = norm(xn);
        if !(r > 0.0) {
            return Err(invalid("xi_n", "must be nonzero"));
        }
        let z = pad(xi0);
        let rz = norm(z);
        if !(rz > 0.0) {
            return Err(invalid("xi0", "must be nonzero"));
        }
        Ok(Self {
            params,
            xi_n: xn,
            xi_n_abs: r,
            xi_bar: [xn[0] / r, xn[1] / r],
            xi0: [z[0] / rz, z[1] / rz],
        })
    }
}

/// B(u) = (1+u)^{a} - 1 - a·u for u >= -1.
pub(crate) fn binomial_remainder(a: f64, u: f64) -> f64 {
    if u.abs() < 0.25 {
        // Σ_{k>=2} C(a,k) u^k
        let mut coef = a * (a - 1.0) / 2.0;
        let mut upow = u * u;
        let mut sum = 0.0;
        let mut k = 2.0;
        loop {
            let term = coef * upow;
            sum += term;
            if term == 0.0 || term.abs() <= 1e-18 * sum.abs() || k > 200.0 {
                break;
            }
            coef *= (a - k) / (k + 1.0);
            upow *= u;
            k += 1.0;
        }
        sum
    } else {
        (a * u.ln_1p()).exp_m1() - a * u
    }
}

/// Φn(ξ) = |ξn|^{2-α}(|ξ+ξn|^α - |ξn|^α - α|ξn|^{α-2} ξn·ξ), evaluated without cancellation.
pub fn shifted_phase(ctx: &ShiftedPhaseContext, xi: &[f64]) -> f64 {
    shifted_phase_at(ctx, pad(xi))
}

pub(crate) fn shifted_phase_at(ctx: &ShiftedPhaseContext, xi: [f64; 2]) -> f64 {
    let alpha = ctx.params.alpha;
    let r = ctx.xi_n_abs;
    let s2 = dot(xi, xi);
    if s2 == 0.0 {
        return 0.0;
    }
    let u = 2.0 * dot(ctx.xi_bar, xi) / r + s2 / (r * r);
    r * r * binomial_remainder(alpha / 2.0, u) + 0.5 * alpha * s2
}

/// (α|ξ|² + α(α-2)(ξ·ξ0)²)/2.
pub fn limit_phase(xi: &[f64], xi0: &[f64], alpha: f64) -> f64 {
    limit_phase_at(pad(xi), pad(xi0), alpha)
}

pub(crate) fn limit_phase_at(xi: [f64; 2], xi0: [f64; 2], alpha: f64) -> f64 {
    let p = dot(xi, xi0);
    0.5 * (alpha * dot(xi, xi) + alpha * (alpha - 2.0) * p * p)
}

/// Limit-phase Hessian by central differences (step h).
pub fn limit_phase_hessian_fd(xi0: &[f64], alpha: f64, d: usize, h: f64) -> Vec<Vec<f64>> {
    let z = pad(xi0);
    let f = |a: f64, b: f64| limit_phase_at([a, b], z, alpha);
    let mut out = vec![vec![0.0; d]; d];
    let e = |i: usize| if i == 0 { [h, 0.0] } else { [0.0, h] };
    for i in 0..d {
        for j in 0..d {
            let (ei, ej) = (e(i), e(j));
            let pp = f(ei[0] + ej[0], ei[1] + ej[1]);
            let pm = f(ei[0] - ej[0], ei[1] - ej[1]);
            let mp = f(-ei[0] + ej[0], -ei[1] + ej[1]);
            let mm = f(-ei[0] - ej[0], -ei[1] - ej[1]);
            out[i][j] = (pp - pm - mp + mm) / (4.0 * h * h);
        }
    }
    out
}

/// max over the samples of |Φn - limit_phase|, with ξ0 = ξ̄n.
pub fn phase_error_sup(ctx: &ShiftedPhaseContext, samples: &[[f64; 2]]) -> f64 {
    samples
        .iter()
        .map(|&xi| (shifted_phase_at(ctx, xi) - limit_phase_at(xi, ctx.xi0, ctx.params.alpha)).abs())
        .fold(0.0, f64::max)
}
