use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::functionals::generator_norm;
use crate::params::ExtensionParams;
use crate::propagator::{limit_transform, support_within, FieldGenerator, ShiftedForm, ShiftedPhaseContext};
use crate::trial::TrialFunction;

use super::constants::a_star;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRow {
    pub xi_n: f64,
    /// ‖T̄ⁿ_α f‖_{q0}, tail included.
    pub norm: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub alpha: f64,
    pub d: usize,
    pub direction: Vec<f64>,
    pub a_star: f64,
    /// ‖e^{itΔ} Ã0 f‖_{q0}.
    pub schrodinger_norm: f64,
    /// a*·‖e^{itΔ} Ã0 f‖_{q0}.
    pub target: f64,
    pub rows: Vec<AsymptoticRow>,
    /// Relative errors strictly decrease along the ladder.
    pub decreasing: bool,
}

/// ‖T̄ⁿ_α f‖_{q0} for ξn = |ξn|·ξ̄ along `ladder`, against the Schrödinger limit.
pub fn asymptotic_experiment(
    f: &TrialFunction,
    direction: &[f64],
    ladder: &[f64],
    params: &ExtensionParams,
    time_nodes: usize,
) -> Result<AsymptoticReport> {
    let d = params.d;
    if direction.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: direction.len(),
        });
    }
    let dn = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(dn > 0.0) {
        return Err(invalid("direction", "must be nonzero"));
    }
    let unit: Vec<f64> = direction.iter().map(|v| v / dn).collect();
    if ladder.is_empty() || ladder.windows(2).any(|w| !(w[1] > w[0])) || !(ladder[0] > 0.0) {
        return Err(invalid("ladder", "must be positive and strictly increasing"));
    }
    if f.l2_norm() == 0.0 {
        return Err(Error::ZeroFunction);
    }
    // the normalized weight vanishes at ξ = -ξn
    if !support_within(f, ladder[0]) {
        return Err(Error::SupportOverflow {
            lost_fraction: f.norm_fraction_where(|p| p[0].hypot(p[1]) > ladder[0]),
        });
    }
    let q = params.q0;
    let norm_of = |gen: &FieldGenerator| -> Result<f64> {
        let times = gen.default_time_grid_for(time_nodes, q)?;
        Ok(generator_norm(gen, &times, q)?.tail_corrected())
    };
    let a = a_star(d, params.alpha)?;
    let g = limit_transform(f, &unit, params.alpha)?;
    let schrodinger_norm = norm_of(&FieldGenerator::schrodinger(&g))?;
    let target = a * schrodinger_norm;
    let mut rows = Vec::with_capacity(ladder.len());
    for &r in ladder {
        let xi_n: Vec<f64> = unit.iter().map(|v| v * r).collect();
        let ctx = ShiftedPhaseContext::new(*params, &xi_n)?;
        let norm = norm_of(&FieldGenerator::shifted(f, &ctx, ShiftedForm::Normalized))?;
        rows.push(AsymptoticRow {
            xi_n: r,
            norm,
            rel_error: (norm - target).abs() / target,
        });
    }
    let decreasing = rows.windows(2).all(|w| w[1].rel_error < w[0].rel_error);
    Ok(AsymptoticReport {
        alpha: params.alpha,
        d,
        direction: unit,
        a_star: a,
        schrodinger_norm,
        target,
        rows,
        decreasing,
    })
}
