//! The d = 2 convolution-measure program: fσ_α * fσ_α for radial profiles, the trial
//! value Q(f), the bracket π/(α√(α-1)) < Q_α⁴ <= π/α and the duality with the
//! Strichartz quotient.

mod convolution;
mod profile;
mod sweep;

pub use convolution::{
    angle_refinement, bracket_check, q4_once, q_trial, sigma_convolution, sigma_convolution_at, BracketReport,
    ConvQuadrature, ConvolutionField, QReport,
};
pub use profile::{RadialProfile, PROFILE_SAMPLES};
pub use sweep::{
    alpha_sweep, duality_check, optimize_profile, standard_profiles, write_sweep_csv, DualityReport,
    ProfileOptimization, SweepRow,
};
