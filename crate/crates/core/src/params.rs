use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Dimension, dispersion exponent and the derived Strichartz exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtensionParams {
    pub d: usize,
    pub alpha: f64,
    pub q0: f64,
}

impl ExtensionParams {
    pub fn new(d: usize, alpha: f64) -> Result<Self> {
        if d != 1 && d != 2 {
            return Err(Error::UnsupportedDimension(d));
        }
        if !(alpha >= 2.0) || !alpha.is_finite() {
            return Err(invalid("alpha", format!("must be a finite real >= 2, got {alpha}")));
        }
        let q0 = (2 * d + 4) as f64 / d as f64;
        debug_assert!(q0 == if d == 1 { 6.0 } else { 4.0 });
        Ok(Self { d, alpha, q0 })
    }

    /// Exponent of the derivative weight in the extension operator.
    pub fn weight_exponent(&self) -> f64 {
        (self.alpha - 2.0) / self.q0
    }

    pub fn is_schrodinger(&self) -> bool {
        self.alpha == 2.0
    }
}
