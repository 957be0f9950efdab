use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Time nodes with quadrature weights, symmetric about t = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Half-width of the truncation box [-T, T].
    pub t_max: f64,
    /// Scale below which the nodes are close to uniform (0 for plain trapezoid grids).
    pub t_scale: f64,
}

impl TimeGrid {
    /// t = t_s·sinh(s) with s uniform on [-S, S], S = asinh(T/t_s); trapezoid in s.
    ///
    /// Dense near t = 0 and geometric further out.
    pub fn sinh_mapped(t_scale: f64, t_max: f64, n: usize) -> Result<Self> {
        if !(t_scale > 0.0) || !(t_max > 0.0) || n < 3 {
            return Err(invalid(
                "time grid",
                format!("need t_scale > 0, t_max > 0, n >= 3; got {t_scale}, {t_max}, {n}"),
            ));
        }
        let s_max = (t_max / t_scale).asinh();
        let ds = 2.0 * s_max / (n - 1) as f64;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for k in 0..n {
            // index from both ends so the grid is exactly symmetric
            let s = if 2 * k < n - 1 {
                -s_max + k as f64 * ds
            } else {
                s_max - (n - 1 - k) as f64 * ds
            };
            let end = k == 0 || k == n - 1;
            nodes.push(t_scale * s.sinh());
            weights.push(t_scale * s.cosh() * ds * if end { 0.5 } else { 1.0 });
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self {
            nodes,
            weights,
            t_max,
            t_scale,
        })
    }

    /// Trapezoid weights for arbitrary increasing nodes.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("times", "must be strictly increasing"));
        }
        let n = nodes.len();
        let mut weights = vec![0.0; n];
        for k in 0..n.saturating_sub(1) {
            let h = 0.5 * (nodes[k + 1] - nodes[k]);
            weights[k] += h;
            weights[k + 1] += h;
        }
        let t_max = nodes.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        Ok(Self {
            nodes,
            weights,
            t_max,
            t_scale: 0.0,
        })
    }

    pub fn uniform(t_max: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid("times", "need at least two nodes"));
        }
        let nodes = (0..n)
            .map(|k| -t_max + 2.0 * t_max * k as f64 / (n - 1) as f64)
            .collect();
        Self::from_nodes(nodes)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Same grid with every time multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            nodes: self.nodes.iter().map(|t| t * c).collect(),
            weights: self.weights.iter().map(|w| w * c).collect(),
            t_max: self.t_max * c,
            t_scale: self.t_scale * c,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinh_grid_is_symmetric_and_integrates_lorentzian() {
        let g = TimeGrid::sinh_mapped(0.01, 50.0, 401).unwrap();
        for k in 0..g.len() {
            assert_eq!(g.nodes[k], -g.nodes[g.len() - 1 - k]);
        }
        let total: f64 = g.weights.iter().sum();
        assert!((total - 100.0).abs() < 1e-3 * 100.0);
        let t0 = 0.05;
        let s: f64 = g
            .nodes
            .iter()
            .zip(&g.weights)
            .map(|(t, w)| w / (1.0 + (t / t0).powi(2)))
            .sum();
        let exact = 2.0 * t0 * (50.0f64 / t0).atan();
        assert!((s - exact).abs() < 1e-6 * exact, "{s} vs {exact}");
    }

    #[test]
    fn trapezoid_from_nodes() {
        let g = TimeGrid::uniform(1.0, 11).unwrap();
        let s: f64 = g.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        assert!(TimeGrid::from_nodes(vec![0.0, 0.0]).is_err());
    }
}
