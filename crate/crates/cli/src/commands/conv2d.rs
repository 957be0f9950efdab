//! Radial convolution pipeline: sweep, duality, optimize.

use clap::{Args, Subcommand};
use fracext::conv2d::{
    alpha_sweep, duality_check, optimize_profile, standard_profiles, write_sweep_csv, ConvQuadrature, RadialProfile,
    SweepRow,
};
use fracext::extremals::{OptimizerConfig, TrialFamily};
use fracext::functionals::QuotientOptions;
use fracext::FrequencyGrid;
use serde_json::json;

use super::{grid_json, resolve_grid, to_value, Ctx, Failures};
use crate::config::{AlphaSpec, ProfileSpec};
use crate::error::CliError;
use crate::output::f17;

#[derive(Subcommand, Debug)]
pub enum Conv2dCmd {
    /// Q⁴ of the standard profiles (and optionally an optimized spline) across α.
    Sweep(SweepArgs),
    /// 2π·quotient⁴ from the Strichartz pipeline against Q⁴.
    Duality(DualityArgs),
    /// Maximize Q⁴ over nonnegative radial splines.
    Optimize(ProfileOptArgs),
}

pub fn run(cmd: Conv2dCmd, ctx: &mut Ctx) -> Result<Failures, CliError> {
    match cmd {
        Conv2dCmd::Sweep(a) => sweep(a, ctx),
        Conv2dCmd::Duality(a) => duality(a, ctx),
        Conv2dCmd::Optimize(a) => optimize(a, ctx),
    }
}

pub fn command_name(cmd: &Conv2dCmd) -> &'static str {
    match cmd {
        Conv2dCmd::Sweep(_) => "conv2d sweep",
        Conv2dCmd::Duality(_) => "conv2d duality",
        Conv2dCmd::Optimize(_) => "conv2d optimize",
    }
}

fn quadrature(ctx: &mut Ctx, n: Option<usize>) -> Result<ConvQuadrature, CliError> {
    let n = ctx.get("quad-n", n, ConvQuadrature::default().n_rho)?;
    if n < 2 || n % 2 == 1 {
        return Err(CliError::Usage(format!("--quad-n must be even and >= 2, got {n}")));
    }
    Ok(ConvQuadrature {
        n_rho: n,
        n_level: n,
        n_angle: n,
    })
}

fn optimizer(ctx: &mut Ctx, dof: usize, restarts: Option<usize>, max_iters: Option<u64>) -> Result<OptimizerConfig, CliError> {
    let mut c = OptimizerConfig::new(TrialFamily::RadialSpline, dof);
    c.restarts = ctx.get("restarts", restarts, 2usize)?;
    c.max_iters = ctx.get("max-iters", max_iters, 150u64)?;
    c.seed = ctx.seed;
    Ok(c)
}

fn verdict(witnessed: bool) -> &'static str {
    if witnessed {
        "strict-inequality-witnessed"
    } else {
        "inconclusive"
    }
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// α values: start:stop:step or a comma-separated list (required).
    #[arg(long)]
    pub alpha: Option<AlphaSpec>,
    /// Quadrature intervals per direction at the base resolution [default: 64].
    #[arg(long)]
    pub quad_n: Option<usize>,
    /// Also optimize a radial spline with this many knots at every α (0 = off) [default: 0].
    #[arg(long)]
    pub optimize_dof: Option<usize>,
    /// Optimizer restarts [default: 2].
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Optimizer iterations per restart [default: 150].
    #[arg(long)]
    pub max_iters: Option<u64>,
}

fn sweep(a: SweepArgs, ctx: &mut Ctx) -> Result<Failures, CliError> {
    let alphas = ctx.require("alpha", a.alpha)?.values;
    if alphas.iter().any(|&x| !(x >= 2.0)) {
        return Err(CliError::Usage("--alpha: every value must be >= 2".into()));
    }
    let quad = quadrature(ctx, a.quad_n)?;
    let dof = ctx.get("optimize-dof", a.optimize_dof, 0usize)?;
    let oc = if dof > 0 { Some(optimizer(ctx, dof, a.restarts, a.max_iters)?) } else { None };
    ctx.run.set_grid(json!({ "d": 2, "quadrature": quad }));

    let mut rows = alpha_sweep(&alphas, &standard_profiles, quad)?;
    if let Some(oc) = &oc {
        for &alpha in &alphas {
            let o = optimize_profile(alpha, oc, quad)?;
            rows.push(SweepRow {
                alpha,
                q4: o.report.q4,
                lower_endpoint: o.bracket.lower,
                upper_endpoint: o.bracket.upper,
                margin: o.bracket.margin,
                profile_id: format!("radial-spline-{dof}"),
                quad_error: o.report.quad_error,
            });
        }
    }

    // one row per α: the best lower witness
    let mut best: Vec<SweepRow> = Vec::new();
    let mut summary = Vec::new();
    let mut failures = vec![];
    for &alpha in &alphas {
        let at: Vec<&SweepRow> = rows.iter().filter(|r| r.alpha == alpha).collect();
        let top = at.iter().copied().max_by(|x, y| x.q4.total_cmp(&y.q4)).expect("every α has rows").clone();
        let violated: Vec<&str> = at.iter().filter(|r| r.bracket().upper_violated).map(|r| r.profile_id.as_str()).collect();
        for id in &violated {
            failures.push(format!("α = {alpha}: profile {id} exceeds the upper bound π/α"));
        }
        let b = top.bracket();
        summary.push(json!({
            "alpha": alpha, "profile_id": top.profile_id, "Q4": top.q4, "quad_error": top.quad_error,
            "lower_endpoint": b.lower, "upper_endpoint": b.upper, "margin": b.margin,
            "verdict": verdict(b.lower_witnessed), "upper_violations": violated,
        }));
        best.push(top);
    }
    ctx.json("sweep.json", &json!({ "quadrature": quad, "rows": summary }))?;
    let mut csv = Vec::new();
    write_sweep_csv(&mut csv, &best).map_err(|e| CliError::Io(e.to_string()))?;
    ctx.run.write_bytes("sweep.csv", &csv)?;
    let mut csv = Vec::new();
    write_sweep_csv(&mut csv, &rows).map_err(|e| CliError::Io(e.to_string()))?;
    ctx.run.write_bytes("sweep_all.csv", &csv)?;
    Ok(failures)
}

#[derive(Args, Debug)]
pub struct DualityArgs {
    /// Dispersion exponent α >= 2 (required).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// gaussian, exp-power or annulus:R0,W [default: gaussian].
    #[arg(long)]
    pub profile: Option<ProfileSpec>,
    /// Dilation applied before sampling on the frequency grid [default: 3.2].
    #[arg(long)]
    pub dilate: Option<f64>,
    /// [default: 16]
    #[arg(long)]
    pub grid_xi: Option<f64>,
    /// [default: 256]
    #[arg(long)]
    pub grid_m: Option<usize>,
    /// Time nodes [default: 257].
    #[arg(long)]
    pub times: Option<usize>,
    /// Repeat the Strichartz side on the doubled grid [default: false].
    #[arg(long)]
    pub refine: Option<bool>,
    /// [default: 64]
    #[arg(long)]
    pub quad_n: Option<usize>,
}

fn profile(spec: &ProfileSpec, alpha: f64) -> fracext::Result<RadialProfile> {
    match spec {
        ProfileSpec::Gaussian => RadialProfile::gaussian(1.0),
        ProfileSpec::ExpPower => RadialProfile::exp_power(alpha, 1.0),
        ProfileSpec::Annulus(r0, w) => RadialProfile::annulus(*r0, *w),
    }
}

fn duality(a: DualityArgs, ctx: &mut Ctx) -> Result<Failures, CliError> {
    let alpha = ctx.require("alpha", a.alpha)?;
    let spec = ctx.get("profile", a.profile, ProfileSpec::Gaussian)?;
    let dilate = ctx.get("dilate", a.dilate, 3.2)?;
    let nt = ctx.get("times", a.times, 257usize)?;
    let refine = ctx.get("refine", a.refine, false)?;
    let quad = quadrature(ctx, a.quad_n)?;
    let grid = resolve_grid(ctx, 2, a.grid_xi, a.grid_m, FrequencyGrid::default_for(2)?)?;
    ctx.run.set_grid(grid_json(&grid, Some(nt)));

    let f = profile(&spec, alpha)?.dilated(dilate)?;
    let rep = duality_check(&f, alpha, grid, QuotientOptions { time_nodes: nt, refine }, quad)?;
    let mut out = to_value(&rep);
    out["profile"] = json!(spec.to_string());
    ctx.json("duality.json", &out)?;
    Ok(vec![])
}

#[derive(Args, Debug)]
pub struct ProfileOptArgs {
    /// Dispersion exponent α > 2 (required).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Spline knots on [0, 1] [default: 6].
    #[arg(long)]
    pub dof: Option<usize>,
    /// [default: 2]
    #[arg(long)]
    pub restarts: Option<usize>,
    /// [default: 150]
    #[arg(long)]
    pub max_iters: Option<u64>,
    /// [default: 64]
    #[arg(long)]
    pub quad_n: Option<usize>,
}

fn optimize(a: ProfileOptArgs, ctx: &mut Ctx) -> Result<Failures, CliError> {
    let alpha = ctx.require("alpha", a.alpha)?;
    let dof = ctx.get("dof", a.dof, 6usize)?;
    let oc = optimizer(ctx, dof, a.restarts, a.max_iters)?;
    let quad = quadrature(ctx, a.quad_n)?;
    ctx.run.set_grid(json!({ "d": 2, "quadrature": quad }));

    let o = optimize_profile(alpha, &oc, quad)?;
    ctx.json(
        "profile_optimize.json",
        &json!({
            "alpha": alpha, "params": o.params, "report": o.report, "bracket": o.bracket,
            "verdict": verdict(o.bracket.lower_witnessed),
            "converged": o.converged, "evaluations": o.evaluations,
        }),
    )?;
    let rows: Vec<Vec<String>> = o.profile.nodes.iter().zip(&o.profile.values).map(|(r, v)| vec![f17(*r), f17(*v)]).collect();
    ctx.run.write_csv("profile.csv", &["r", "f"], &rows)?;
    let mut failures = vec![];
    if o.bracket.upper_violated {
        failures.push(format!("Q⁴ = {} exceeds the upper bound π/α = {}", o.report.q4, o.bracket.upper));
    }
    Ok(failures)
}
