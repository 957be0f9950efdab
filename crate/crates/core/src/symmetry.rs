use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::params::ExtensionParams;
use crate::resample::pullback;
use crate::trial::TrialFunction;

/// Scaling h, space translation x0, time translation t0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryElement {
    pub h: f64,
    pub x0: Vec<f64>,
    pub t0: f64,
}

impl SymmetryElement {
    pub fn new(h: f64, x0: Vec<f64>, t0: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(invalid("h", format!("must be positive, got {h}")));
        }
        Ok(Self { h, x0, t0 })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            h: 1.0,
            x0: vec![0.0; d],
            t0: 0.0,
        }
    }

    /// The element acting as `self` after `first`.
    pub fn after(&self, first: &Self, alpha: f64) -> Self {
        let h1 = first.h;
        Self {
            h: h1 * self.h,
            x0: first
                .x0
                .iter()
                .zip(&self.x0)
                .map(|(a, b)| a + h1 * b)
                .collect(),
            t0: first.t0 + h1.powf(alpha) * self.t0,
        }
    }

    pub fn inverse(&self, alpha: f64) -> Self {
        let h = 1.0 / self.h;
        Self {
            h,
            x0: self.x0.iter().map(|x| -h * x).collect(),
            t0: -h.powf(alpha) * self.t0,
        }
    }
}

fn phase(g: &SymmetryElement, alpha: f64, xi: [f64; 2]) -> Complex64 {
    let (a, b) = (xi[0] / g.h, xi[1] / g.h);
    let r = a.hypot(b);
    let x0 = [g.x0[0], *g.x0.get(1).unwrap_or(&0.0)];
    Complex64::from_polar(1.0, g.t0 * r.powf(alpha) + x0[0] * a + x0[1] * b)
}

/// f̂ ↦ h^{-d/2} e^{i(t0|ξ/h|^α + x0·ξ/h)} f̂(ξ/h), resampled on the same grid.
pub fn apply_symmetry(
    f: &TrialFunction,
    g: &SymmetryElement,
    params: &ExtensionParams,
) -> Result<TrialFunction> {
    let grid = *f.grid();
    grid.check_dim(&g.x0)?;
    let half = 0.5 * grid.box_len();
    if let Some(x) = g.x0.iter().find(|x| x.abs() >= half) {
        return Err(Error::GridOverflow {
            shift: *x,
            half_box: half,
        });
    }
    let alpha = params.alpha;
    if g.h == 1.0 {
        return f.multiply(|xi| phase(g, alpha, xi));
    }
    let lim = grid.xi_max / g.h;
    let lost = f.norm_fraction_where(|p| p[0].abs() >= lim || p[1].abs() >= lim);
    if lost > 1e-6 {
        return Err(Error::SupportOverflow {
            lost_fraction: lost,
        });
    }
    let amp = g.h.powf(-(grid.d as f64) / 2.0);
    let h = g.h;
    let values = pullback(
        &grid,
        f.values(),
        |xi| [xi[0] / h, xi[1] / h],
        |xi| phase(g, alpha, xi) * amp,
    );
    f.with_values(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::FrequencyGrid;
    use crate::trial::make_gaussian;

    fn params() -> ExtensionParams {
        ExtensionParams::new(1, 3.0).unwrap()
    }

    #[test]
    fn identity_is_exact() {
        let g = FrequencyGrid::new(1, 16.0, 256).unwrap();
        let f = make_gaussian(g, &[0.0], 2.0).unwrap();
        let out = apply_symmetry(&f, &SymmetryElement::identity(1), &params()).unwrap();
        assert_eq!(out.values(), f.values());
    }

    #[test]
    fn translation_inverse() {
        let g = FrequencyGrid::new(1, 16.0, 256).unwrap();
        let f = make_gaussian(g, &[1.0], 2.0).unwrap();
        let a = SymmetryElement::new(1.0, vec![2.5], 0.0).unwrap();
        let b = SymmetryElement::new(1.0, vec![-2.5], 0.0).unwrap();
        let out = apply_symmetry(&apply_symmetry(&f, &a, &params()).unwrap(), &b, &params()).unwrap();
        for (x, y) in out.values().iter().zip(f.values()) {
            assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn scaling_overflow_detected() {
        let g = FrequencyGrid::new(1, 16.0, 256).unwrap();
        let f = make_gaussian(g, &[0.0], 4.0).unwrap();
        let big = SymmetryElement::new(4.0, vec![0.0], 0.0).unwrap();
        assert!(matches!(
            apply_symmetry(&f, &big, &params()),
            Err(Error::SupportOverflow { .. })
        ));
    }

    #[test]
    fn composition_law_matches_sequential_application() {
        let g = FrequencyGrid::new(1, 32.0, 1024).unwrap();
        let f = make_gaussian(g, &[0.0], 2.0).unwrap();
        let p = params();
        let g1 = SymmetryElement::new(1.5, vec![0.7], 0.01).unwrap();
        let g2 = SymmetryElement::new(0.8, vec![-0.4], 0.02).unwrap();
        let seq = apply_symmetry(&apply_symmetry(&f, &g1, &p).unwrap(), &g2, &p).unwrap();
        let comp = apply_symmetry(&f, &g2.after(&g1, p.alpha), &p).unwrap();
        let diff = seq.add(&comp.scaled(Complex64::new(-1.0, 0.0))).unwrap();
        assert!(diff.l2_norm() < 1e-8, "{}", diff.l2_norm());
        let inv = g1.inverse(p.alpha).after(&g1, p.alpha);
        assert!((inv.h - 1.0).abs() < 1e-15 && inv.x0[0].abs() < 1e-15 && inv.t0.abs() < 1e-15);
    }
}
