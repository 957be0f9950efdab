//! Power-law extrapolation of ∫|u|^q dx beyond the time box.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    /// Estimated ∫_{|t|>T} ∫|u|^q dx dt, both signs together.
    pub bound: f64,
    pub exponent_pos: f64,
    pub exponent_neg: f64,
    /// False when a side had too few samples or a non-integrable exponent.
    pub fitted: bool,
}

const MIN_EXPONENT: f64 = 1.1;

fn side(nodes: &[f64], g: &[f64], sign: f64) -> (f64, f64, bool) {
    let t_end = nodes
        .iter()
        .map(|t| t * sign)
        .fold(0.0f64, f64::max);
    if t_end <= 0.0 {
        return (0.0, 0.0, false);
    }
    let pts: Vec<(f64, f64)> = nodes
        .iter()
        .zip(g)
        .filter(|(t, v)| {
            let s = *t * sign;
            s >= 0.5 * t_end && **v > 0.0
        })
        .map(|(t, v)| ((t * sign).ln(), v.ln()))
        .collect();
    let g_end = nodes
        .iter()
        .zip(g)
        .filter(|(t, _)| **t * sign == t_end)
        .map(|(_, v)| *v)
        .next()
        .unwrap_or(0.0);
    if pts.len() < 3 {
        // dispersive t^{-2} fallback anchored at the last node
        return (g_end * t_end, 2.0, false);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return (g_end * t_end, 2.0, false);
    }
    let p = -sxy / sxx;
    let log_c = my + p * mx;
    let ok = p > MIN_EXPONENT;
    let pe = p.max(MIN_EXPONENT);
    let bound = (log_c + (1.0 - pe) * t_end.ln()).exp() / (pe - 1.0);
    (bound, p, ok)
}

/// Fits g(t) ≈ C|t|^{-p} on T/2 <= |t| <= T for each sign and integrates the fit to infinity.
pub fn fit_tail(nodes: &[f64], g: &[f64]) -> TailFit {
    let (bp, pp, okp) = side(nodes, g, 1.0);
    let (bn, pn, okn) = side(nodes, g, -1.0);
    TailFit {
        bound: bp + bn,
        exponent_pos: pp,
        exponent_neg: pn,
        fitted: okp && okn,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_tail() {
        let nodes: Vec<f64> = (-100..=100).map(|k| k as f64 * 0.1).collect();
        let g: Vec<f64> = nodes.iter().map(|t| 3.0 / (t * t).max(1e-3)).collect();
        let fit = fit_tail(&nodes, &g);
        assert!(fit.fitted);
        assert!((fit.exponent_pos - 2.0).abs() < 1e-10);
        // 2 * ∫_10^∞ 3 t^{-2} dt = 0.6
        assert!((fit.bound - 0.6).abs() < 1e-10);
    }
}
