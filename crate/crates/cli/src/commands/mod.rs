pub mod analysis;
pub mod conv2d;
pub mod geometry;
pub mod strichartz;

use std::fmt::Display;
use std::fs::File;
use std::io::BufReader;
use std::str::FromStr;

use fracext::container::read_trial_expecting;
use fracext::{FrequencyGrid, TrialFunction};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Config, TrialSpec};
use crate::error::CliError;
use crate::output::Run;

/// Paper-derived assertion failures collected by a command.
pub type Failures = Vec<String>;

pub struct Ctx {
    pub cfg: Config,
    pub run: Run,
    pub seed: u64,
}

impl Ctx {
    pub fn json<T: Serialize>(&mut self, name: &str, report: &T) -> Result<(), CliError> {
        self.run.write_json(name, &self.cfg, report)
    }

    pub fn require<T: FromStr + Display>(&mut self, key: &str, cli: Option<T>) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        self.cfg.require(key, cli)
    }

    pub fn get<T: FromStr + Display>(&mut self, key: &str, cli: Option<T>, default: T) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        self.cfg.get(key, cli, default)
    }
}

pub fn grid_json(g: &FrequencyGrid, time_nodes: Option<usize>) -> Value {
    json!({ "d": g.d, "xi_max": g.xi_max, "m": g.m, "time_nodes": time_nodes })
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes to JSON")
}

/// Frequency grid from --grid-xi / --grid-m with the given defaults.
pub fn resolve_grid(
    ctx: &mut Ctx,
    dim: usize,
    xi: Option<f64>,
    m: Option<usize>,
    default: FrequencyGrid,
) -> Result<FrequencyGrid, CliError> {
    let xi = ctx.get("grid-xi", xi, default.xi_max)?;
    let m = ctx.get("grid-m", m, default.m)?;
    FrequencyGrid::new(dim, xi, m).map_err(|e| CliError::Usage(format!("--grid-xi/--grid-m: {e}")))
}

/// Trial function from `--trial`. A file carries its own grid, so grid flags are rejected with it.
pub fn load_trial(
    ctx: &mut Ctx,
    dim: usize,
    spec: &TrialSpec,
    xi: Option<f64>,
    m: Option<usize>,
    default: FrequencyGrid,
    gaussian: impl FnOnce(FrequencyGrid) -> fracext::Result<TrialFunction>,
) -> Result<TrialFunction, CliError> {
    match spec {
        TrialSpec::Gaussian => {
            let grid = resolve_grid(ctx, dim, xi, m, default)?;
            Ok(gaussian(grid)?)
        }
        TrialSpec::File(path) => {
            for (key, given) in [
                ("grid-xi", ctx.cfg.opt::<f64>("grid-xi", xi)?.is_some()),
                ("grid-m", ctx.cfg.opt::<usize>("grid-m", m)?.is_some()),
            ] {
                if given {
                    return Err(CliError::Usage(format!(
                        "--{key} cannot be combined with --trial file:PATH (the grid comes from the file header)"
                    )));
                }
            }
            let file =
                File::open(path).map_err(|e| CliError::Usage(format!("--trial {}: {e}", path.display())))?;
            read_trial_expecting(BufReader::new(file), dim).map_err(|e| match e {
                fracext::Error::DimensionMismatch { expected, found } => CliError::Format(format!(
                    "--trial {}: dimension mismatch: header has d = {found}, --dim is {expected}",
                    path.display()
                )),
                other => CliError::Format(format!("--trial {}: {other}", path.display())),
            })
        }
    }
}

pub fn zeros(dim: usize) -> Vec<f64> {
    vec![0.0; dim]
}

/// Unit vector along the first axis.
pub fn first_axis(dim: usize) -> Vec<f64> {
    let mut v = zeros(dim);
    v[0] = 1.0;
    v
}
