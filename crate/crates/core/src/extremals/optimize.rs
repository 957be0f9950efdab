use std::io::Write;
use std::sync::Mutex;

use argmin::core::{CostFunction, Executor, State, TerminationReason};
use argmin::solver::neldermead::NelderMead;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::functionals::{strichartz_quotient, QuotientOptions, QuotientReport};
use crate::grid::FrequencyGrid;
use crate::params::ExtensionParams;
use crate::trial::TrialFunction;

use super::constants::{precompactness_criterion, CriterionReport};
use super::families::{FamilyBuilder, TrialFamily};

/// Cost assigned to parameters outside the family's domain.
const INVALID_COST: f64 = 1e30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub family: TrialFamily,
    pub dof: usize,
    pub max_iters: u64,
    /// Simplex standard deviation (of the objective) at which a restart stops.
    pub tolerance: f64,
    pub seed: u64,
    pub restarts: usize,
}

impl OptimizerConfig {
    pub fn new(family: TrialFamily, dof: usize) -> Self {
        Self {
            family,
            dof,
            max_iters: 200,
            tolerance: 1e-7,
            seed: 0,
            restarts: 4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dof == 0 {
            return Err(invalid("dof", "must be >= 1"));
        }
        if !(self.tolerance > 0.0) {
            return Err(invalid("tolerance", "must be positive"));
        }
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(invalid("restarts", "restarts and max_iters must be >= 1"));
        }
        Ok(())
    }
}

/// One objective evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub restart: usize,
    pub eval: usize,
    pub value: f64,
    /// Best value seen so far within the restart.
    pub best: f64,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub params: Vec<f64>,
    pub value: f64,
    pub restart: usize,
    /// False when some restart stopped at max_iters.
    pub converged: bool,
    pub trajectory: Vec<TrajectoryPoint>,
}

struct Negated<'a, F> {
    objective: &'a F,
    sphere: bool,
    log: Mutex<Vec<(f64, Vec<f64>)>>,
}

fn project(p: &[f64], sphere: bool) -> Option<Vec<f64>> {
    if !sphere {
        return Some(p.to_vec());
    }
    let n = p.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(n > 1e-12) || !n.is_finite() {
        return None;
    }
    Some(p.iter().map(|v| v / n).collect())
}

impl<F: Fn(&[f64]) -> Option<f64>> CostFunction for Negated<'_, F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        let (value, shown) = match project(p, self.sphere) {
            Some(q) => ((self.objective)(&q).filter(|v| v.is_finite()), q),
            None => (None, p.clone()),
        };
        self.log.lock().unwrap().push((value.unwrap_or(f64::NAN), shown));
        Ok(value.map_or(INVALID_COST, |v| -v))
    }
}

fn random_start(rng: &mut ChaCha8Rng, dim: usize, sphere: bool) -> Vec<f64> {
    if sphere {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        project(&v, true).unwrap_or_else(|| {
            let mut e = vec![0.0; dim];
            e[0] = 1.0;
            e
        })
    } else {
        (0..dim).map(|_| rng.random_range(-0.5..0.5)).collect()
    }
}

/// Draws cold starting points for restarts.
pub type StartSampler<'a> = &'a (dyn Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync);

/// Derivative-free maximization of `objective` (None = outside the domain).
///
/// Restart k starts at `start` when given (k = 0) or at a point drawn from the
/// ChaCha8 stream k of `seed` (by `sampler`, else a standard normal or uniform
/// vector); restarts run in parallel and the largest value wins, ties going to the
/// lowest restart index.
pub fn maximize<F>(
    objective: &F,
    dim: usize,
    sphere: bool,
    config: &OptimizerConfig,
    start: Option<&[f64]>,
    step: f64,
    sampler: Option<StartSampler<'_>>,
) -> Result<SearchOutcome>
where
    F: Fn(&[f64]) -> Option<f64> + Sync,
{
    config.validate()?;
    if dim == 0 {
        return Err(invalid("dim", "must be >= 1"));
    }
    let runs: Vec<Result<(Vec<f64>, f64, bool, Vec<TrajectoryPoint>)>> = (0..config.restarts)
        .into_par_iter()
        .map(|k| {
            let x0 = match (k, start) {
                (0, Some(s)) => s.to_vec(),
                _ => {
                    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                    rng.set_stream(k as u64);
                    match sampler {
                        Some(draw) => draw(&mut rng),
                        None => random_start(&mut rng, dim, sphere),
                    }
                }
            };
            let mut simplex = vec![x0.clone()];
            for i in 0..dim {
                let mut v = x0.clone();
                v[i] += step;
                simplex.push(v);
            }
            let solver = NelderMead::new(simplex)
                .with_sd_tolerance(config.tolerance)
                .map_err(|e| invalid("tolerance", e.to_string()))?;
            let problem = Negated {
                objective,
                sphere,
                log: Mutex::new(Vec::new()),
            };
            let res = Executor::new(problem, solver)
                .configure(|s| s.max_iters(config.max_iters))
                .run()
                .map_err(|e| invalid("optimizer", e.to_string()))?;
            let converged = matches!(
                res.state().get_termination_reason(),
                Some(TerminationReason::SolverConverged)
            );
            let log = res.problem.problem.map(|p| p.log.into_inner().unwrap()).unwrap_or_default();
            let mut best = f64::NEG_INFINITY;
            let mut best_params = x0;
            let mut traj = Vec::with_capacity(log.len());
            for (i, (v, p)) in log.into_iter().enumerate() {
                if v > best {
                    best = v;
                    best_params = p.clone();
                }
                traj.push(TrajectoryPoint {
                    restart: k,
                    eval: i,
                    value: v,
                    best,
                    params: p,
                });
            }
            Ok((best_params, best, converged, traj))
        })
        .collect();
    let mut out: Option<SearchOutcome> = None;
    let mut all_converged = true;
    let mut trajectory = Vec::new();
    for (k, run) in runs.into_iter().enumerate() {
        let (p, v, conv, traj) = run?;
        all_converged &= conv;
        trajectory.extend(traj);
        if out.as_ref().is_none_or(|o| v > o.value) {
            out = Some(SearchOutcome {
                params: p,
                value: v,
                restart: k,
                converged: false,
                trajectory: Vec::new(),
            });
        }
    }
    let mut out = out.expect("at least one restart");
    if !out.value.is_finite() {
        return Err(invalid("optimizer", "no admissible point found"));
    }
    out.converged = all_converged;
    out.trajectory = trajectory;
    Ok(out)
}

/// CSV trajectory: restart, eval, value, best, p0..p{n-1}.
pub fn write_trajectory_csv<W: Write>(mut w: W, traj: &[TrajectoryPoint]) -> std::io::Result<()> {
    let n = traj.first().map_or(0, |t| t.params.len());
    let mut header = String::from("restart,eval,value,best");
    for i in 0..n {
        header.push_str(&format!(",p{i}"));
    }
    writeln!(w, "{header}")?;
    for t in traj {
        let mut line = format!("{},{},{:.16e},{:.16e}", t.restart, t.eval, t.value, t.best);
        for p in &t.params {
            line.push_str(&format!(",{p:.16e}"));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub family: TrialFamily,
    pub params: Vec<f64>,
    #[serde(skip)]
    pub best: Option<TrialFunction>,
    /// Refined evaluation of the winner.
    pub report: QuotientReport,
    pub criterion: CriterionReport,
    pub converged: bool,
    pub evaluations: usize,
    #[serde(skip)]
    pub trajectory: Vec<TrajectoryPoint>,
}

/// Starting point of restart 0: the pure base Gaussian where the family contains it.
fn default_start(family: TrialFamily, dim: usize) -> Vec<f64> {
    match family {
        TrialFamily::GaussianParams => vec![0.0, 0.0],
        TrialFamily::HermiteCoeffs => {
            let mut v = vec![0.0; dim];
            v[0] = 1.0;
            v
        }
        TrialFamily::RadialSpline => {
            let v: Vec<f64> = (0..dim).map(|k| (-(k as f64 / dim as f64).powi(2) * 4.0).exp()).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / n).collect()
        }
    }
}

/// Maximizes the Strichartz quotient over a trial family on `grid`.
///
/// With `warm_start` the first restart begins at the family's base Gaussian; all other
/// restarts are cold (random).
pub fn optimize_quotient(
    params: &ExtensionParams,
    grid: FrequencyGrid,
    config: &OptimizerConfig,
    opts: QuotientOptions,
    warm_start: bool,
) -> Result<OptimizationResult> {
    config.validate()?;
    if grid.d != params.d {
        return Err(crate::Error::DimensionMismatch {
            expected: params.d,
            found: grid.d,
        });
    }
    let builder = FamilyBuilder::new(config.family, grid);
    let dim = config.family.dimension(config.dof);
    let eval_opts = QuotientOptions { refine: false, ..opts };
    let objective = |p: &[f64]| -> Option<f64> {
        let f = builder.build(p).ok()?;
        // an unaccepted tail fit means the time box is pre-asymptotic; the extrapolated
        // value is then unreliable and easy for the search to exploit
        let r = strichartz_quotient(&f, params, eval_opts).ok()?;
        r.grid.tail_fitted.then_some(r.value)
    };
    let start = warm_start.then(|| default_start(config.family, dim));
    let step = if config.family.on_sphere() { 0.3 } else { 0.25 };
    let gaussian_start = |rng: &mut ChaCha8Rng| loop {
        // uniform in (ln w, c) over the representable region
        let p = vec![rng.random_range(-1.2..0.0), rng.random_range(-2.0..2.0)];
        if builder.build(&p).is_ok() {
            break p;
        }
    };
    let sampler: Option<StartSampler<'_>> = match config.family {
        TrialFamily::GaussianParams => Some(&gaussian_start),
        _ => None,
    };
    let outcome = maximize(&objective, dim, config.family.on_sphere(), config, start.as_deref(), step, sampler)?;
    let best = builder.build(&outcome.params)?.normalized()?;
    let report = strichartz_quotient(&best, params, QuotientOptions { refine: true, ..opts })?;
    let criterion = precompactness_criterion(
        params.d,
        params.alpha,
        report.value,
        report.refinement_delta.unwrap_or(0.0),
    )?;
    Ok(OptimizationResult {
        family: config.family,
        params: outcome.params,
        best: Some(best),
        report,
        criterion,
        converged: outcome.converged,
        evaluations: outcome.trajectory.len(),
        trajectory: outcome.trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximizes_a_concave_bump() {
        let f = |p: &[f64]| Some(-(p[0] - 0.3).powi(2) - 2.0 * (p[1] + 0.1).powi(2));
        let mut c = OptimizerConfig::new(TrialFamily::GaussianParams, 2);
        c.tolerance = 1e-12;
        c.max_iters = 500;
        let out = maximize(&f, 2, false, &c, None, 0.2, None).unwrap();
        assert!((out.params[0] - 0.3).abs() < 1e-4 && (out.params[1] + 0.1).abs() < 1e-4);
        assert!(out.converged);
        for w in out.trajectory.windows(2) {
            if w[0].restart == w[1].restart {
                assert!(w[1].best >= w[0].best);
            }
        }
    }

    #[test]
    fn sphere_search_finds_dominant_direction() {
        // Rayleigh quotient of diag(3, 1, 1): maximizer ±e0
        let f = |p: &[f64]| Some(3.0 * p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        let mut c = OptimizerConfig::new(TrialFamily::HermiteCoeffs, 3);
        c.tolerance = 1e-12;
        c.max_iters = 400;
        c.seed = 5;
        let out = maximize(&f, 3, true, &c, None, 0.3, None).unwrap();
        assert!((out.value - 3.0).abs() < 1e-6);
        let n: f64 = out.params.iter().map(|v| v * v).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_across_runs() {
        let f = |p: &[f64]| Some((p[0] * 3.0).sin() + (p[1] * 2.0).cos());
        let mut c = OptimizerConfig::new(TrialFamily::GaussianParams, 2);
        c.restarts = 6;
        c.seed = 11;
        let a = maximize(&f, 2, false, &c, None, 0.2, None).unwrap();
        let b = maximize(&f, 2, false, &c, None, 0.2, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_points_are_skipped() {
        let f = |p: &[f64]| if p[0] > 1.0 { None } else { Some(p[0]) };
        let c = OptimizerConfig::new(TrialFamily::GaussianParams, 1);
        let out = maximize(&f, 1, false, &c, Some(&[0.0]), 0.2, None).unwrap();
        assert!(out.value <= 1.0 && out.value > 0.9);
    }

    #[test]
    fn config_validation() {
        let mut c = OptimizerConfig::new(TrialFamily::RadialSpline, 0);
        assert!(c.validate().is_err());
        c.dof = 3;
        c.tolerance = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let t = vec![TrajectoryPoint {
            restart: 0,
            eval: 0,
            value: 0.5,
            best: 0.5,
            params: vec![1.0, 2.0],
        }];
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &t).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), "restart,eval,value,best,p0,p1");
        assert_eq!(lines.next().unwrap().split(',').count(), 6);
    }
}
