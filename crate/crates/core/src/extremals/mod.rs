//! Sharp-constant machinery: a*, the Schrödinger constants, the precompactness
//! criterion, quotient maximization, the asymptotic Schrödinger experiment and the
//! mass-splitting ledger.

mod asymptotic;
mod constants;
mod families;
mod ledger;
mod optimize;

pub use asymptotic::{asymptotic_experiment, AsymptoticReport, AsymptoticRow};
pub use constants::{
    a_star, criterion_threshold, precompactness_criterion, schrodinger_sharp_constant, threshold_fourth_d2,
    CriterionReport, Verdict,
};
pub use families::{hermite_functions, hermite_modes, FamilyBuilder, RadialSpline, TrialFamily};
pub use ledger::{brezis_lieb_ledger, translate, LedgerReport, LedgerRow};
pub use optimize::{
    maximize, optimize_quotient, write_trajectory_csv, OptimizationResult, OptimizerConfig, SearchOutcome,
    StartSampler, TrajectoryPoint,
};
