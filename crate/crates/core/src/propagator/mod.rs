//! Fractional flow, derivative weights, the extension operator and the
//! frequency-shifted operators with their quadratic limit.

mod a0;
mod field;
mod phase;

pub use a0::{a0_apply, A0Transform};
pub use field::{
    alias_free_factor, axis_decay_exponent, evolve, extension_field, fractional_derivative, limit_transform,
    shifted_field, spatial_l2, support_within, FieldGenerator, ShiftedForm, SpaceTimeField,
    TimeScales, DEFAULT_TIME_NODES,
};
pub(crate) use phase::binomial_remainder;
pub use phase::{
    limit_phase, limit_phase_hessian_fd, phase_error_sup, shifted_phase, ShiftedPhaseContext,
};

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use num_complex::Complex64;

    use super::*;
    use crate::grid::FrequencyGrid;
    use crate::params::ExtensionParams;
    use crate::timegrid::TimeGrid;
    use crate::trial::{make_gaussian, TrialFunction};

    /// Closed-form Schrödinger evolution of A·exp(-(ξ-c)²/(2σ²)), d = 1.
    fn gaussian_oracle(amp: f64, c: f64, sigma: f64, t: f64, x: f64) -> Complex64 {
        let a = Complex64::new(1.0 / (2.0 * sigma * sigma), -t);
        let b = x + 2.0 * t * c;
        let pre = Complex64::from_polar(amp / (2.0 * PI), x * c + t * c * c);
        pre * (Complex64::new(PI, 0.0) / a).sqrt() * (-(b * b) / (4.0 * a)).exp()
    }

    #[test]
    fn evolve_matches_closed_form_gaussian() {
        let grid = FrequencyGrid::new(1, 32.0, 2048).unwrap();
        let (c, sigma) = (1.5, 3.0);
        let f = make_gaussian(grid, &[c], sigma).unwrap();
        // recover the normalization amplitude from the peak node
        let k = grid.nearest(c).unwrap();
        let amp = f.values()[k].re;
        let p = ExtensionParams::new(1, 2.0).unwrap();
        for t in [0.0, 0.05, 0.4] {
            let u = evolve(&f, t, &p);
            for j in (0..grid.m).step_by(37) {
                let e = gaussian_oracle(amp, c, sigma, t, grid.x_node(j));
                assert!((u[j] - e).norm() < 1e-8, "t={t} j={j}: {} vs {}", u[j], e);
            }
        }
    }

    #[test]
    fn evolve_at_zero_is_identity_and_mass_conserved() {
        let grid = FrequencyGrid::new(1, 16.0, 512).unwrap();
        let f = make_gaussian(grid, &[2.0], 1.5).unwrap();
        let p = ExtensionParams::new(1, 3.0).unwrap();
        let u0 = evolve(&f, 0.0, &p);
        for (a, b) in u0.iter().zip(f.spatial()) {
            assert!((a - b).norm() < 1e-14);
        }
        for t in [0.1, 1.0, 10.0] {
            let u = evolve(&f, t, &p);
            assert!((spatial_l2(&grid, &u) - f.l2_norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn fractional_derivative_rules() {
        let grid = FrequencyGrid::new(1, 4.0, 64).unwrap();
        let f = TrialFunction::from_fn(grid, |p| {
            Complex64::new(if (1.0..=2.0).contains(&p[0]) { 1.0 } else { 0.0 }, 0.0)
        })
        .unwrap();
        let d = fractional_derivative(&f, 0.5).unwrap();
        for (i, z) in d.values().iter().enumerate() {
            let x = grid.node(i);
            let e = if (1.0..=2.0).contains(&x) { x.sqrt() } else { 0.0 };
            assert_eq!(z.re, e);
        }
        let back = fractional_derivative(&fractional_derivative(&f, 1.0).unwrap(), -1.0).unwrap();
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-10);
        }
        assert_eq!(fractional_derivative(&f, 0.0).unwrap(), f);
        let g = make_gaussian(grid, &[0.0], 1.0).unwrap();
        assert!(matches!(
            fractional_derivative(&g, -0.5),
            Err(crate::Error::Singularity { .. })
        ));
    }

    #[test]
    fn extension_slice_at_zero_and_constant_mass() {
        let grid = FrequencyGrid::new(1, 16.0, 512).unwrap();
        let f = make_gaussian(grid, &[3.0], 1.5).unwrap();
        let p = ExtensionParams::new(1, 3.0).unwrap();
        let times = TimeGrid::from_nodes(vec![0.0, 0.5, 1.0]).unwrap();
        let field = extension_field(&f, times, &p);
        let expect = fractional_derivative(&f, 1.0 / 6.0).unwrap().spatial();
        for (a, b) in field.slice(0).iter().zip(&expect) {
            assert!((a - b).norm() < 1e-14);
        }
        let m0 = spatial_l2(&grid, field.slice(0));
        for k in 1..3 {
            assert!((spatial_l2(&grid, field.slice(k)) - m0).abs() < 1e-10);
        }
        // α = 2: plain evolution
        let p2 = ExtensionParams::new(1, 2.0).unwrap();
        let e2 = extension_field(&f, TimeGrid::from_nodes(vec![0.3, 0.7]).unwrap(), &p2);
        let u = evolve(&f, 0.7, &p2);
        assert_eq!(e2.slice(1), &u[..]);
    }

    #[test]
    fn shifted_field_at_alpha_two_is_free_flow() {
        let grid = FrequencyGrid::new(1, 16.0, 256).unwrap();
        let f = make_gaussian(grid, &[0.0], 1.0).unwrap();
        let p = ExtensionParams::new(1, 2.0).unwrap();
        let ctx = ShiftedPhaseContext::new(p, &[40.0]).unwrap();
        let times = TimeGrid::from_nodes(vec![0.1, 0.2]).unwrap();
        let (field, ok) = shifted_field(&f, &ctx, times, ShiftedForm::Normalized);
        assert!(ok);
        let u = evolve(&f, 0.2, &p);
        for (a, b) in field.slice(1).iter().zip(&u) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn a0_unitary_and_gaussian_widths() {
        let grid = FrequencyGrid::new(2, 16.0, 128).unwrap();
        let sigma = 1.0;
        let f = make_gaussian(grid, &[0.0, 0.0], sigma).unwrap();
        let a = A0Transform::new(2, &[1.0, 0.0], 4.0).unwrap();
        let g = a0_apply(&f, &a).unwrap();
        assert!((g.l2_norm() - 1.0).abs() < 1e-8);
        // closed-form image: exp(-(ξ1/√6)²/2 - (ξ2/√2)²/2) scaled by |det|^{-1/2}
        let amp = f.values()[grid.len() / 2 + grid.m / 2].re;
        let det = a.det_abs;
        for i in (0..grid.len()).step_by(97) {
            let p = grid.point(i);
            let e = amp / det.sqrt()
                * (-(p[0] * p[0] / 6.0 + p[1] * p[1] / 2.0) / (2.0 * sigma * sigma)).exp();
            assert!((g.values()[i].re - e).abs() < 1e-9, "{p:?}");
        }
        let p3 = A0Transform::new(2, &[0.6, 0.8], 3.0).unwrap();
        assert!((a0_apply(&f, &p3).unwrap().l2_norm() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn limit_phase_equals_a0_quadratic_form() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let th: f64 = rng.random_range(0.0..2.0 * PI);
            let alpha: f64 = rng.random_range(2.0..6.0);
            let z = [th.cos(), th.sin()];
            let a = A0Transform::new(2, &z, alpha).unwrap();
            let xi = [rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)];
            let lp = limit_phase(&xi, &z, alpha);
            assert!((lp - a.quadratic_form(xi)).abs() < 1e-12 * lp.max(1.0));
        }
    }

    #[test]
    fn time_scales_for_default_gaussian() {
        let grid = FrequencyGrid::default_for(1).unwrap();
        let f = make_gaussian(grid, &[0.0], grid.xi_max / 5.0).unwrap();
        let gen = FieldGenerator::extension(&f, &ExtensionParams::new(1, 2.0).unwrap());
        let s = gen.time_scales().unwrap();
        // wrap-limited: about (L - 2·0.67)/(2·55)
        assert!(s.t_max > 1.5 && s.t_max < 2.2, "{s:?}");
        assert!(s.t_scale < 0.01);
    }
}
