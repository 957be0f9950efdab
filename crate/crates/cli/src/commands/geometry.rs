//! Decomposition geometry scans.

use clap::{Args, Subcommand};
use fracext::geometry::{
    build_sectors, hessian_bounds_scan, levelset_ratio, overlap_count, related_pairs_in_sector, sumset_gap_stats,
    whitney_related, CubePair, DecompositionConfig, DyadicCube, SectorDecomposition, THETA_BAR_CAP,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{to_value, Ctx, Failures};
use crate::config::List;
use crate::error::CliError;
use crate::output::f17;

const CSV_HEADER: [&str; 6] = ["alpha", "N", "r", "sector", "quantity", "value"];

#[derive(Subcommand, Debug)]
pub enum GeometryCmd {
    /// Hessian eigenvalues of F_η and the angle condition per sector.
    HessianScan(HessianArgs),
    /// Sumset gap r²·F over related pairs along a ladder of scales.
    GapStats(GapArgs),
    /// Overlap counts of the lifted slabs between two scales.
    Overlap(OverlapArgs),
    /// Range of the level-set ratio near the base point.
    LevelsetRatio(RatioArgs),
    /// Every pair of distinct same-sector points is related at exactly one scale.
    Whitney(WhitneyArgs),
}

pub fn run(cmd: GeometryCmd, ctx: &mut Ctx) -> Result<Failures, CliError> {
    match cmd {
        GeometryCmd::HessianScan(a) => hessian(a, ctx),
        GeometryCmd::GapStats(a) => gaps(a, ctx),
        GeometryCmd::Overlap(a) => overlap(a, ctx),
        GeometryCmd::LevelsetRatio(a) => ratio(a, ctx),
        GeometryCmd::Whitney(a) => whitney(a, ctx),
    }
}

pub fn command_name(cmd: &GeometryCmd) -> &'static str {
    match cmd {
        GeometryCmd::HessianScan(_) => "geometry hessian-scan",
        GeometryCmd::GapStats(_) => "geometry gap-stats",
        GeometryCmd::Overlap(_) => "geometry overlap",
        GeometryCmd::LevelsetRatio(_) => "geometry levelset-ratio",
        GeometryCmd::Whitney(_) => "geometry whitney",
    }
}

fn row(alpha: f64, n: u32, r: Option<u64>, sector: Option<usize>, q: &str, v: String) -> Vec<String> {
    vec![
        f17(alpha),
        n.to_string(),
        r.map_or(String::new(), |r| r.to_string()),
        sector.map_or(String::new(), |s| s.to_string()),
        q.to_string(),
        v,
    ]
}

#[derive(Args, Debug)]
pub struct HessianArgs {
    /// Dispersion exponent α > 2 (required).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Dimension, 1 or 2 [default: 2].
    #[arg(long)]
    pub dim: Option<usize>,
    /// Sampled pairs per sector [default: 100000].
    #[arg(long)]
    pub samples: Option<usize>,
}

fn hessian(a: HessianArgs, ctx: &mut Ctx) -> Result<Failures, CliError> {
    let alpha = ctx.require("alpha", a.alpha)?;
    let dim = ctx.get("dim", a.dim, 2usize)?;
    let samples = ctx.get("samples", a.samples, 100_000usize)?;
    let config = DecompositionConfig::for_alpha(dim, alpha, ctx.seed)?;
    let s = build_sectors(1.0, &config);
    ctx.run.set_grid(json!({ "d": dim, "n_scale": 1.0 }));

    let scan = hessian_bounds_scan(&s, alpha, samples, ctx.seed);
    let mut out = to_value(&scan);
    out["decomposition"] = to_value(&config);
    ctx.json("hessian.json", &out)?;
    let rows: Vec<Vec<String>> = scan
        .per_sector_min
        .iter()
        .enumerate()
        .map(|(j, &m)| row(alpha, config.n_whitney, None, Some(j), "min_eig", f17(m)))
        .collect();
    ctx.run.write_csv("hessian.csv", &CSV_HEADER, &rows)?;

    let mut failures = vec![];
    if !(scan.min_eig > 0.0) || scan.per_sector_min.iter().any(|&m| !(m > 0.0)) {
        failures.push(format!("Hessian not positive definite: min eigenvalue {}", scan.min_eig));
    }
    if scan.a1_violations > 0 {
        failures.push(format!("angle condition violated at {} samples", scan.a1_violations));
    }
    if scan.quad_violations > 0 {
        failures.push(format!("quadratic form below 1/2 at {} samples", scan.quad_violations));
    }
    Ok(failures)
}

/// Sectors of the given Whitney depth under the capped angle budget.
fn shallow(dim: usize, depth: u32) -> Result<SectorDecomposition, CliError> {
    Ok(build_sectors(1.0, &DecompositionConfig::minimal(dim, depth, THETA_BAR_CAP)?))
}

fn pairs(s: &SectorDecomposition, j: usize, r: u64) -> Result<Vec<CubePair>, CliError> {
    Ok(related_pairs_in_sector(s, j, r, s.config.n_whitney)?)
}

/// Sector with the most related pairs at scale r (lowest index on ties).
fn busiest(s: &SectorDecomposition, r: u64) -> Result<usize, CliError> {
    let mut best = (0, 0);
    for j in 0..s.sectors.len() {
        let n = pairs(s, j, r)?.len();
        if n > best.1 {
            best = (j, n);
        }
    }
    Ok(best.0)
}

#[derive(Args, Debug)]
pub struct GapArgs {
    /// Dispersion exponent α > 2 (required).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Dimension, 1 or 2 [default: 2].
    #[arg(long)]
    pub dim: Option<usize>,
    /// Scales r [default: 16,32,64].
    #[arg(long)]
    pub ladder: Option<List<u64>>,
    /// Whitney depth N [default: 2].
    #[arg(long)]
    pub depth: Option<u32>,
    /// Uniform samples per pair on top of the lattice [default: 4].
    #[arg(long)]
    pub samples: Option<usize>,
}

fn gaps(a: GapArgs, ctx: &mut Ctx) -> Result<Failures, CliError> {
    let alpha = ctx.require("alpha", a.alpha)?;
    let dim = ctx.get("dim", a.dim, 2usize)?;
    let ladder = ctx.get("ladder", a.ladder, List(vec![16, 32, 64]))?.0;
    let depth = ctx.get("depth", a.depth, 2u32)?;
    let samples = ctx.get("samples", a.samples, 4usize)?;
    let s = shallow(dim, depth)?;
    ctx.run.set_grid(json!({ "d": dim, "n_scale": 1.0 }));

    let j = busiest(&s, ladder[0])?;
    let mut stats = Vec::new();
    let mut rows = Vec::new();
    for &r in &ladder {
        let p = pairs(&s, j, r)?;
        if p.is_empty() {
            return Err(CliError::Usage(format!("--ladder: no related pairs at r = {r} in sector {j}")));
        }
        let g = sumset_gap_stats(&p, alpha, samples, ctx.seed);
        rows.push(row(alpha, depth, Some(r), Some(j), "pairs", g.pairs.to_string()));
        for (q, v) in [("gap_min", g.min), ("gap_max", g.max), ("gap_ratio", g.ratio)] {
            rows.push(row(alpha, depth, Some(r), Some(j), q, f17(v)));
        }
        stats.push(g);
    }
    let steps: Vec<f64> = stats.windows(2).map(|w| w[1].ratio / w[0].ratio).collect();
    let worst = steps.iter().map(|&q| q.max(1.0 / q)).fold(1.0, f64::max);
    ctx.json(
        "gap_stats.json",
        &json!({ "alpha": alpha, "n_whitney": depth, "sector": j, "stats": stats, "ratio_steps": steps, "max_step": worst }),
    )?;
    ctx.run.write_csv("gap_stats.csv", &CSV_HEADER, &rows)?;
    Ok(vec![])
}

#[derive(Args, Debug)]
pub struct OverlapArgs {
    /// Dispersion exponent α > 2 (required).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Dimension, 1 or 2 [default: 2].
    #[arg(long)]
    pub dim: Option<usize>,
    /// Base scale r [default: 16].
    #[arg(long)]
    pub r: Option<u64>,
    /// Comparison scales s [default: 16,32,256].
    #[arg(long)]
    pub s: Option<List<u64>>,
    /// Whitney depth N [default: 2].
    #[arg(long)]
    pub depth: Option<u32>,
}

fn overlap(a: OverlapArgs, ctx: &mut Ctx) -> Result<Failures, CliError> {
    let alpha = ctx.require("alpha", a.alpha)?;
    let dim = ctx.get("dim", a.dim, 2usize)?;
    let r = ctx.get("r", a.r, 16u64)?;
    let scales = ctx.get("s", a.s, List(vec![16, 32, 256]))?.0;
    let depth = ctx.get("depth", a.depth, 2u32)?;
    let sd = shallow(dim, depth)?;
    ctx.run.set_grid(json!({ "d": dim, "n_scale": 1.0 }));

    let j = busiest(&sd, r)?;
    let pr = pairs(&sd, j, r)?;
    if pr.is_empty() {
        return Err(CliError::Usage(format!("--r: no related pairs at r = {r}")));
    }
    // slab heights come from the gap range at the base scale
    let g = sumset_gap_stats(&pr, alpha, 4, ctx.seed);
    let mut reports = Vec::new();
    let mut rows = Vec::new();
    for &s in &scales {
        let ps = pairs(&sd, j, s)?;
        let o = overlap_count(&pr, &ps, g.min, g.max);
        rows.push(row(alpha, depth, Some(s), Some(j), "max_count", o.max_count.to_string()));
        rows.push(row(alpha, depth, Some(s), Some(j), "min_count", o.min_count.to_string()));
        reports.push(o);
    }
    ctx.json(
        "overlap.json",
        &json!({ "alpha": alpha, "n_whitney": depth, "sector": j, "r": r, "c2": g.min, "c3": g.max, "overlaps": reports }),
    )?;
    ctx.run.write_csv("overlap.csv", &CSV_HEADER, &rows)?;
    Ok(vec![])
}

#[derive(Args, Debug)]
pub struct RatioArgs {
    /// Dispersion exponent α > 2 (required).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Samples [default: 100000].
    #[arg(long)]
    pub samples: Option<usize>,
}

fn ratio(a: RatioArgs, ctx: &mut Ctx) -> Result<Failures, CliError> {
    let alpha = ctx.require("alpha", a.alpha)?;
    let samples = ctx.get("samples", a.samples, 100_000usize)?;
    ctx.run.set_grid(json!({ "d": 2 }));
    let rep = levelset_ratio(alpha, samples, ctx.seed);
    let mut out = to_value(&rep);
    out["within_bounds"] = json!(rep.within_bounds());
    ctx.json("levelset_ratio.json", &out)?;
    let rows = vec![
        row(alpha, 0, None, None, "ratio_min", f17(rep.min)),
        row(alpha, 0, None, None, "ratio_max", f17(rep.max)),
    ];
    ctx.run.write_csv("levelset_ratio.csv", &CSV_HEADER, &rows)?;
    let mut failures = vec![];
    if !rep.within_bounds() {
        failures.push(format!(
            "level-set ratio range [{}, {}] leaves [{}, {}] (max at {:?})",
            rep.min, rep.max, rep.lower_bound, rep.upper_bound, rep.argmax
        ));
    }
    Ok(failures)
}

#[derive(Args, Debug)]
pub struct WhitneyArgs {
    /// Dispersion exponent used for the sector decomposition [default: 3].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Dimension, 1 or 2 [default: 2].
    #[arg(long)]
    pub dim: Option<usize>,
    /// Number of sampled pairs [default: 10000].
    #[arg(long)]
    pub pairs: Option<usize>,
    /// Largest scale exponent: r ranges over 2^1 .. 2^max_exp [default: 24].
    #[arg(long)]
    pub max_exp: Option<u32>,
}

fn whitney(a: WhitneyArgs, ctx: &mut Ctx) -> Result<Failures, CliError> {
    let alpha = ctx.get("alpha", a.alpha, 3.0)?;
    let dim = ctx.get("dim", a.dim, 2usize)?;
    let n_pairs = ctx.get("pairs", a.pairs, 10_000usize)?;
    let max_exp = ctx.get("max-exp", a.max_exp, 24u32)?;
    if !(1..=40).contains(&max_exp) {
        return Err(CliError::Usage("--max-exp must lie in 1..=40".into()));
    }
    let s = build_sectors(1.0, &DecompositionConfig::for_alpha(dim, alpha, ctx.seed)?);
    let n_w = s.config.n_whitney;
    ctx.run.set_grid(json!({ "d": dim, "n_scale": 1.0 }));

    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut histogram = [0usize; 3];
    let mut witness = None;
    let mut checked = 0;
    while checked < n_pairs {
        let j = rng.random_range(0..s.sectors.len());
        let (p, q) = (s.sample(j, &mut rng), s.sample(j, &mut rng));
        if p == q {
            continue;
        }
        let hits = (1..=max_exp)
            .filter(|&e| {
                let r = 1u64 << e;
                match (DyadicCube::containing(dim, 1.0, r, p), DyadicCube::containing(dim, 1.0, r, q)) {
                    (Some(x), Some(y)) => whitney_related(&x, &y, n_w),
                    _ => false,
                }
            })
            .count();
        histogram[hits.min(2)] += 1;
        if hits != 1 && witness.is_none() {
            witness = Some(json!({ "xi": p, "xi_prime": q, "scales": hits }));
        }
        checked += 1;
    }
    let violations = histogram[0] + histogram[2];
    ctx.json(
        "whitney.json",
        &json!({
            "n_whitney": n_w, "pairs": checked, "max_exp": max_exp,
            "unrelated": histogram[0], "unique": histogram[1], "multiple": histogram[2],
            "violations": violations, "witness": witness,
        }),
    )?;
    let rows = vec![
        row(alpha, n_w, None, None, "unique", histogram[1].to_string()),
        row(alpha, n_w, None, None, "violations", violations.to_string()),
    ];
    ctx.run.write_csv("whitney.csv", &CSV_HEADER, &rows)?;
    let mut failures = vec![];
    if violations > 0 {
        failures.push(format!("{violations} of {checked} pairs are not related at exactly one scale"));
    }
    Ok(failures)
}
