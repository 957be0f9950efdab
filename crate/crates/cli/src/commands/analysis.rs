//! bilinear and smoothing.

use clap::Args;
use fracext::functionals::{bilinear_ratio, local_smoothing_functional, sphere_kernel_decay, GaussianWeight};
use fracext::geometry::{whitney_related, DyadicCube};
use fracext::trial::default_gaussian;
use fracext::{make_gaussian, ExtensionParams, FrequencyGrid};
use serde_json::json;

use super::{grid_json, load_trial, resolve_grid, zeros, Ctx, Failures};
use crate::config::{List, TrialSpec};
use crate::error::CliError;
use crate::output::f17;

#[derive(Args, Debug)]
pub struct BilinearArgs {
    /// Dispersion exponent α >= 2 (required).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Dimension, 1 or 2 [default: 2].
    #[arg(long)]
    pub dim: Option<usize>,
    /// Exponent p in ((d+3)/(d+1), (d+2)/d) [default: 1.9 for d=2, 2.5 for d=1].
    #[arg(long)]
    pub p: Option<f64>,
    /// Cube scales r; each uses the depth-1 pair at indices r and r+2 on the first axis [default: 8,16,32].
    #[arg(long)]
    pub ladder: Option<List<u64>>,
    /// `gaussian` (centered, width Ξ/5) or `file:PATH` [default: gaussian].
    #[arg(long)]
    pub trial: Option<TrialSpec>,
    /// [default: 2.5]
    #[arg(long)]
    pub grid_xi: Option<f64>,
    /// [default: 256]
    #[arg(long)]
    pub grid_m: Option<usize>,
}

fn cube(dim: usize, r: u64, i: i64) -> Result<DyadicCube, CliError> {
    let idx = if dim == 1 { vec![i] } else { vec![i, 0] };
    Ok(DyadicCube::new(dim, 1.0, r, &idx)?)
}

pub fn bilinear(a: BilinearArgs, ctx: &mut Ctx) -> Result<Failures, CliError> {
    let alpha = ctx.require("alpha", a.alpha)?;
    let dim = ctx.get("dim", a.dim, 2usize)?;
    let p = ctx.get("p", a.p, if dim == 1 { 2.5 } else { 1.9 })?;
    let ladder = ctx.get("ladder", a.ladder, List(vec![8, 16, 32]))?.0;
    let spec = ctx.get("trial", a.trial, TrialSpec::Gaussian)?;
    let params = ExtensionParams::new(dim, alpha)?;
    let f = load_trial(ctx, dim, &spec, a.grid_xi, a.grid_m, FrequencyGrid::new(dim, 2.5, 256)?, default_gaussian)?;
    ctx.run.set_grid(grid_json(f.grid(), None));

    let mut reports = Vec::new();
    let mut rows = Vec::new();
    for &r in &ladder {
        let i = r as i64;
        let (t, tp) = (cube(dim, r, i)?, cube(dim, r, i + 2)?);
        debug_assert!(whitney_related(&t, &tp, 1));
        let rep = bilinear_ratio(&f, &t, &tp, p, &params)?;
        rows.push(vec![
            r.to_string(),
            f17(rep.ratio),
            f17(rep.norm.value),
            f17(rep.l2_tau),
            f17(rep.l2_tau_prime),
            f17(rep.volume),
        ]);
        reports.push(json!({ "r": r, "report": rep }));
    }
    let ratios: Vec<f64> = reports.iter().filter_map(|r| r["report"]["ratio"].as_f64()).collect();
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    ctx.json(
        "bilinear.json",
        &json!({ "alpha": alpha, "d": dim, "p": p, "rows": reports, "spread": hi / lo }),
    )?;
    ctx.run.write_csv("bilinear.csv", &["r", "ratio", "norm", "l2_tau", "l2_tau_prime", "volume"], &rows)?;
    Ok(vec![])
}

#[derive(Args, Debug)]
pub struct SmoothingArgs {
    /// Dispersion exponent α >= 2 (required).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Dimension, 1 or 2 [default: 1].
    #[arg(long)]
    pub dim: Option<usize>,
    /// Width w of the weight φ(x) = exp(-|x|²/w²) [default: 1].
    #[arg(long)]
    pub width: Option<f64>,
    /// Frequency width of the base Gaussian [default: 1].
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Modulations k along the first axis [default: 0,4,8,16].
    #[arg(long)]
    pub modulations: Option<List<f64>>,
    /// Radii for the sphere-kernel decay fit [default: 4,8,16,32].
    #[arg(long)]
    pub radii: Option<List<f64>>,
    /// Circle quadrature points for the sphere kernel [default: 1024].
    #[arg(long)]
    pub circle_nodes: Option<usize>,
    #[arg(long)]
    pub grid_xi: Option<f64>,
    #[arg(long)]
    pub grid_m: Option<usize>,
}

pub fn smoothing(a: SmoothingArgs, ctx: &mut Ctx) -> Result<Failures, CliError> {
    let alpha = ctx.require("alpha", a.alpha)?;
    let dim = ctx.get("dim", a.dim, 1usize)?;
    let width = ctx.get("width", a.width, 1.0)?;
    let sigma = ctx.get("sigma", a.sigma, 1.0)?;
    let ks = ctx.get("modulations", a.modulations, List(vec![0.0, 4.0, 8.0, 16.0]))?.0;
    let radii = ctx.get("radii", a.radii, List(vec![4.0, 8.0, 16.0, 32.0]))?.0;
    let n_circle = ctx.get("circle-nodes", a.circle_nodes, 1024usize)?;
    let params = ExtensionParams::new(dim, alpha)?;
    let phi = GaussianWeight::new(width)?;
    let grid = resolve_grid(ctx, dim, a.grid_xi, a.grid_m, FrequencyGrid::default_for(dim)?)?;
    ctx.run.set_grid(grid_json(&grid, None));

    let base = make_gaussian(grid, &zeros(dim), sigma)?;
    let mut values = Vec::new();
    let mut rows = Vec::new();
    for &k in &ks {
        let mut shift = zeros(dim);
        shift[0] = k;
        let f = base.modulate(&shift)?;
        let v = local_smoothing_functional(&f, &phi, &params)?.value;
        let normalized = v / f.l2_norm().powi(2);
        rows.push(vec![f17(k), f17(v), f17(normalized)]);
        values.push(normalized);
    }
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
    let spread = values.iter().map(|v| (v / median).max(median / v)).fold(1.0, f64::max);
    let decay = sphere_kernel_decay(&phi, &radii, n_circle)?;
    ctx.json(
        "smoothing.json",
        &json!({
            "alpha": alpha, "d": dim, "width": width, "modulations": ks,
            "normalized": values, "median": median, "max_factor_from_median": spread,
            "sphere_kernel": decay,
        }),
    )?;
    ctx.run.write_csv("smoothing.csv", &["k", "functional", "normalized"], &rows)?;
    Ok(vec![])
}
