use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::functionals::generator_norm;
use crate::params::ExtensionParams;
use crate::propagator::FieldGenerator;
use crate::timegrid::TimeGrid;
use crate::trial::TrialFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    /// Translation |xn| along the first axis.
    pub shift: f64,
    /// |‖v+rn‖² - ‖v‖² - ‖rn‖²|.
    pub l2_defect: f64,
    /// |‖E(v+rn)‖^{q0} - ‖Ev‖^{q0} - ‖E rn‖^{q0}| over the common time box.
    pub strichartz_defect: f64,
    /// Strichartz defect divided by ‖Ev‖^{q0}.
    pub strichartz_relative: f64,
    pub time_nodes: usize,
    pub t_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerReport {
    pub alpha: f64,
    pub d: usize,
    pub rows: Vec<LedgerRow>,
    pub l2_nonincreasing: bool,
    pub strichartz_nonincreasing: bool,
}

/// rn(x) = v'(x - xn e1), built on the frequency side as e^{-i xn ξ1} v̂'(ξ).
pub fn translate(v: &TrialFunction, shift: f64) -> Result<TrialFunction> {
    let half = v.grid().box_len() / 2.0;
    if shift.abs() >= half {
        return Err(Error::GridOverflow {
            shift: shift.abs(),
            half_box: half,
        });
    }
    v.multiply(|xi| Complex64::from_polar(1.0, -shift * xi[0]))
}

/// Mass and Strichartz splitting defects for v + rn with rn = v' translated by each shift.
pub fn brezis_lieb_ledger(
    v: &TrialFunction,
    v_prime: &TrialFunction,
    shifts: &[f64],
    params: &ExtensionParams,
    time_nodes: usize,
) -> Result<LedgerReport> {
    if v.grid() != v_prime.grid() {
        return Err(invalid("v_prime", "must live on the grid of v"));
    }
    if shifts.windows(2).any(|w| !(w[1].abs() > w[0].abs())) {
        return Err(invalid("shifts", "escape ladder must increase in |xn|"));
    }
    let q = params.q0;
    let ev = FieldGenerator::extension(v, params);
    let mut rows = Vec::with_capacity(shifts.len());
    for &s in shifts {
        let r = translate(v_prime, s)?;
        let sum = v.add(&r)?;
        let es = FieldGenerator::extension(&sum, params);
        let er = FieldGenerator::extension(&r, params);
        let times: TimeGrid = es.default_time_grid_for(time_nodes, q)?;
        let p = |g: &FieldGenerator| -> Result<f64> { Ok(generator_norm(g, &times, q)?.value.powf(q)) };
        let (ps, pv, pr) = (p(&es)?, p(&ev)?, p(&er)?);
        let defect = (ps - pv - pr).abs();
        rows.push(LedgerRow {
            shift: s,
            l2_defect: 2.0 * v.inner(&r)?.re.abs(),
            strichartz_defect: defect,
            strichartz_relative: defect / pv,
            time_nodes: times.len(),
            t_max: times.t_max,
        });
    }
    let l2_nonincreasing = rows.windows(2).all(|w| w[1].l2_defect <= w[0].l2_defect);
    let strichartz_nonincreasing = rows.windows(2).all(|w| w[1].strichartz_defect <= w[0].strichartz_defect);
    Ok(LedgerReport {
        alpha: params.alpha,
        d: params.d,
        rows,
        l2_nonincreasing,
        strichartz_nonincreasing,
    })
}
