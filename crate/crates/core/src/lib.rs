//! Numerical laboratory for the fractional Fourier extension operator on the
//! surfaces (ξ, |ξ|^α).
//!
//! Fourier convention: f̂(ξ) = ∫ e^{-ixξ} f(x) dx, inverse with (2π)^{-d}.

pub mod container;
pub mod conv2d;
pub mod error;
pub mod extremals;
pub mod functionals;
pub mod geometry;
pub mod grid;
pub mod params;
pub mod propagator;
pub mod resample;
pub mod summation;
pub mod symmetry;
pub mod tail;
pub mod timegrid;
pub mod trial;

pub use error::{Error, Result};
pub use grid::{FrequencyGrid, Spectral};
pub use params::ExtensionParams;
pub use symmetry::{apply_symmetry, SymmetryElement};
pub use timegrid::TimeGrid;
pub use trial::{l2_norm, make_gaussian, TrialFunction};
