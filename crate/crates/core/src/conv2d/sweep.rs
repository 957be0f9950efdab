use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::extremals::{maximize, OptimizerConfig, RadialSpline};
use crate::functionals::{strichartz_quotient, QuotientOptions};
use crate::grid::FrequencyGrid;
use crate::params::ExtensionParams;

use super::convolution::{bracket_check, q4_once, q_trial, BracketReport, ConvQuadrature, QReport};
use super::profile::{RadialProfile, PROFILE_SAMPLES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub alpha: f64,
    /// Q(f)⁴ from the convolution pipeline.
    pub q4: f64,
    pub quad_error: f64,
    /// Strichartz quotient of the same function on the frequency grid.
    pub quotient: f64,
    pub quotient_refinement_delta: Option<f64>,
    /// 2π·quotient⁴.
    pub two_pi_m4: f64,
    /// |2π·quotient⁴ - Q⁴| / Q⁴.
    pub rel_discrepancy: f64,
}

/// Evaluates one radial f through both pipelines: 2π‖E_α f‖⁴/‖f‖⁴ against Q(f)⁴.
pub fn duality_check(
    f: &RadialProfile,
    alpha: f64,
    grid: FrequencyGrid,
    opts: QuotientOptions,
    quad: ConvQuadrature,
) -> Result<DualityReport> {
    let params = ExtensionParams::new(2, alpha)?;
    let q = q_trial(f, alpha, quad)?;
    let trial = f.to_trial(grid)?;
    let rep = strichartz_quotient(&trial, &params, opts)?;
    let two_pi_m4 = 2.0 * std::f64::consts::PI * rep.value.powi(4);
    Ok(DualityReport {
        alpha,
        q4: q.q4,
        quad_error: q.quad_error,
        quotient: rep.value,
        quotient_refinement_delta: rep.refinement_delta,
        two_pi_m4,
        rel_discrepancy: (two_pi_m4 - q.q4).abs() / q.q4,
    })
}

/// Named default profiles (unit scale; Q is dilation invariant).
pub fn standard_profiles(alpha: f64) -> Result<Vec<(String, RadialProfile)>> {
    Ok(vec![
        ("gaussian".to_string(), RadialProfile::gaussian(1.0)?),
        ("exp-power".to_string(), RadialProfile::exp_power(alpha, 1.0)?),
        ("annulus".to_string(), RadialProfile::annulus(2.0, 0.5)?),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    #[serde(rename = "Q4_lower_witness")]
    pub q4: f64,
    pub lower_endpoint: f64,
    pub upper_endpoint: f64,
    pub margin: f64,
    pub profile_id: String,
    pub quad_error: f64,
}

impl SweepRow {
    fn new(alpha: f64, id: &str, q: &QReport) -> Self {
        let b = bracket_check(alpha, q.q4, q.quad_error);
        Self {
            alpha,
            q4: q.q4,
            lower_endpoint: b.lower,
            upper_endpoint: b.upper,
            margin: b.margin,
            profile_id: id.to_string(),
            quad_error: q.quad_error,
        }
    }

    pub fn bracket(&self) -> BracketReport {
        bracket_check(self.alpha, self.q4, self.quad_error)
    }
}

/// Q⁴ of every profile at every α, one row per trial.
pub fn alpha_sweep(
    alphas: &[f64],
    profiles: &dyn Fn(f64) -> Result<Vec<(String, RadialProfile)>>,
    quad: ConvQuadrature,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &a in alphas {
        for (id, p) in profiles(a)? {
            rows.push(SweepRow::new(a, &id, &q_trial(&p, a, quad)?));
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepRow]) -> std::io::Result<()> {
    writeln!(w, "alpha,Q4_lower_witness,lower_endpoint,upper_endpoint,margin,profile_id,quad_error")?;
    for r in rows {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e}",
            r.alpha, r.q4, r.lower_endpoint, r.upper_endpoint, r.margin, r.profile_id, r.quad_error
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileOptimization {
    pub alpha: f64,
    /// Spline knot parameters (values are their squares), unit norm.
    pub params: Vec<f64>,
    pub profile: RadialProfile,
    pub report: QReport,
    pub bracket: BracketReport,
    pub converged: bool,
    pub evaluations: usize,
}

fn spline_profile(p: &[f64]) -> Result<RadialProfile> {
    let s = RadialSpline::from_params(1.0, p)?;
    RadialProfile::from_fn(1.0, PROFILE_SAMPLES, |r| s.eval(r))
}

/// Maximizes Q(f)⁴ over nonnegative radial splines on [0, 1] with `config.dof` knots.
///
/// Restart 0 starts from a Gaussian-like decay; the winner is re-evaluated at the
/// doubled resolution for its error bar.
pub fn optimize_profile(alpha: f64, config: &OptimizerConfig, quad: ConvQuadrature) -> Result<ProfileOptimization> {
    config.validate()?;
    let dim = config.dof;
    let objective = |p: &[f64]| -> Option<f64> {
        let f = spline_profile(p).ok()?;
        q4_once(&f, alpha, quad).ok()
    };
    let start: Vec<f64> = {
        let v: Vec<f64> = (0..dim).map(|k| (-4.0 * (k as f64 / dim as f64).powi(2)).exp()).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.into_iter().map(|x| x / n).collect()
    };
    let out = maximize(&objective, dim, true, config, Some(&start), 0.3, None)?;
    let profile = spline_profile(&out.params)?;
    let report = q_trial(&profile, alpha, quad)?;
    let bracket = bracket_check(alpha, report.q4, report.quad_error);
    Ok(ProfileOptimization {
        alpha,
        params: out.params,
        profile,
        report,
        bracket,
        converged: out.converged,
        evaluations: out.trajectory.len(),
    })
}
