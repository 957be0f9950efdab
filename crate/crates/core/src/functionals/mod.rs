//! Space-time norms, Strichartz quotients, bilinear norms and local smoothing functionals.

mod bilinear;
mod norms;
mod smoothing;

pub use bilinear::{
    bilinear_exponent_range, bilinear_norm, bilinear_ratio, check_bilinear_exponent, cube_sup_quantity,
    dyadic_family, BilinearReport, CubeSupReport, FrequencyCube,
};
pub use norms::{
    generator_norm, spacetime_norm, spacetime_sup, strichartz_quotient, GridInfo, NormReport, QuotientOptions,
    QuotientReport,
};
pub use smoothing::{
    local_smoothing_functional, local_smoothing_spacetime, sphere_kernel_decay, sphere_kernel_value, DecayReport, GaussianWeight,
};

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use num_complex::Complex64;

    use super::*;
    use crate::grid::FrequencyGrid;
    use crate::params::ExtensionParams;
    use crate::propagator::{extension_field, FieldGenerator};
    use crate::symmetry::{apply_symmetry, SymmetryElement};
    use crate::trial::{make_gaussian, TrialFunction};

    fn gaussian_1d() -> TrialFunction {
        let grid = FrequencyGrid::default_for(1).unwrap();
        make_gaussian(grid, &[0.0], 6.4).unwrap()
    }

    #[test]
    fn zero_field_has_zero_norm() {
        let grid = FrequencyGrid::new(1, 8.0, 64).unwrap();
        let f = TrialFunction::zeros(grid);
        let p = ExtensionParams::new(1, 2.0).unwrap();
        let times = crate::timegrid::TimeGrid::uniform(1.0, 5).unwrap();
        let u = extension_field(&f, times, &p);
        assert_eq!(spacetime_norm(&u, 6.0).unwrap().value, 0.0);
    }

    #[test]
    fn l2_in_space_time_is_box_length_times_mass() {
        let f = gaussian_1d();
        let p = ExtensionParams::new(1, 3.0).unwrap();
        let gen = FieldGenerator::evolution(&f, 3.0);
        let times = gen.default_time_grid(257).unwrap();
        let rep = generator_norm(&gen, &times, 2.0).unwrap();
        let expect = 2.0 * times.t_max * f.l2_norm().powi(2);
        assert!((rep.value.powi(2) - expect).abs() < 1e-2 * expect);
        let _ = p;
    }

    #[test]
    fn sixth_power_matches_closed_form_gaussian() {
        let f = gaussian_1d();
        let grid = *f.grid();
        let sigma: f64 = 6.4;
        let amp = f.values()[grid.m / 2].re;
        let p = ExtensionParams::new(1, 2.0).unwrap();
        let gen = FieldGenerator::extension(&f, &p);
        let times = gen.default_time_grid(129).unwrap();
        let u = gen.oversampled(4).materialize(p, times.clone());
        let rep = spacetime_norm(&u, 6.0).unwrap();
        // ∫|u(t)|⁶dx = (A/2π)⁶ π³ |a|^{-2} √(π/(1.5 b)), a = b - it, b = 1/(2σ²)
        let b = 1.0 / (2.0 * sigma * sigma);
        let spatial = |t: f64| (amp / (2.0 * PI)).powi(6) * PI.powi(3) / (b * b + t * t) * (PI / (1.5 * b)).sqrt();
        let oracle: f64 = times.nodes.iter().zip(&times.weights).map(|(t, w)| w * spatial(*t)).sum();
        let got = rep.value.powi(6);
        assert!((got - oracle).abs() < 1e-8 * oracle, "{got} vs {oracle}");
    }

    #[test]
    fn gaussian_quotient_one_dimension() {
        let f = gaussian_1d();
        let p = ExtensionParams::new(1, 2.0).unwrap();
        let rep = strichartz_quotient(&f, &p, QuotientOptions::default()).unwrap();
        let target = 12f64.powf(-1.0 / 12.0);
        assert!((rep.value - target).abs() < 1e-3, "{rep:?}");
        assert!(rep.truncated_value <= rep.value);
    }

    #[test]
    fn quotient_invariant_under_symmetry() {
        let grid = FrequencyGrid::new(1, 32.0, 2048).unwrap();
        let f = make_gaussian(grid, &[1.0], 3.0).unwrap();
        let p = ExtensionParams::new(1, 3.0).unwrap();
        let g = SymmetryElement::new(2.0, vec![3.0], 1e-3).unwrap();
        let gf = apply_symmetry(&f, &g, &p).unwrap();
        let a = strichartz_quotient(&f, &p, QuotientOptions::default()).unwrap();
        let b = strichartz_quotient(&gf, &p, QuotientOptions::default()).unwrap();
        assert!((a.value - b.value).abs() < 2e-3, "{} vs {}", a.value, b.value);
    }

    #[test]
    fn zero_function_rejected() {
        let grid = FrequencyGrid::new(1, 8.0, 64).unwrap();
        let p = ExtensionParams::new(1, 2.0).unwrap();
        let r = strichartz_quotient(&TrialFunction::zeros(grid), &p, QuotientOptions::default());
        assert_eq!(r.unwrap_err(), crate::error::Error::ZeroFunction);
    }

    #[test]
    fn bilinear_exponent_window() {
        assert!(check_bilinear_exponent(2, 1.9).is_ok());
        assert!(check_bilinear_exponent(2, 2.1).is_err());
        assert!(check_bilinear_exponent(2, 5.0 / 3.0).is_err());
        assert_eq!(bilinear_exponent_range(1), (2.0, 3.0));
    }

    fn smoothing_oracle(f: &TrialFunction, phi: &GaussianWeight, alpha: f64) -> f64 {
        // ∫|D^{(α-1)/2}u(t,x)|² dt = (2πα)^{-1}[∫|f̂|² + 2Re∫_0^∞ e^{2ixξ} f̂(ξ) conj f̂(-ξ) dξ]
        let grid = f.grid();
        let h = grid.spacing();
        let v = f.values();
        let mass: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>() * h;
        let mut cross = 0.0;
        for k in 1..grid.m / 2 {
            let (pos, neg) = (v[grid.m / 2 + k], v[grid.m / 2 - k]);
            cross += phi.hat([2.0 * k as f64 * h, 0.0], 1) * (pos * neg.conj()).re * h;
        }
        cross += 0.5 * phi.hat([0.0, 0.0], 1) * v[grid.m / 2].norm_sqr() * h;
        (phi.hat([0.0, 0.0], 1) * mass + 2.0 * cross) / (2.0 * PI * alpha)
    }

    #[test]
    fn smoothing_matches_one_dimensional_identity() {
        let grid = FrequencyGrid::new(1, 32.0, 2048).unwrap();
        let phi = GaussianWeight::new(1.0).unwrap();
        for (alpha, c) in [(3.0, 0.5), (2.5, 6.0), (5.0, 0.0)] {
            let f = make_gaussian(grid, &[c], 2.0).unwrap();
            let p = ExtensionParams::new(1, alpha).unwrap();
            let got = local_smoothing_functional(&f, &phi, &p).unwrap().value;
            let oracle = smoothing_oracle(&f, &phi, alpha);
            assert!((got - oracle).abs() < 1e-12 * oracle, "alpha {alpha}: {got} vs {oracle}");
        }
    }

    #[test]
    fn smoothing_spacetime_quadrature_agrees_for_fast_packets() {
        let grid = FrequencyGrid::new(1, 32.0, 4096).unwrap();
        let phi = GaussianWeight::new(1.0).unwrap();
        let f = make_gaussian(grid, &[8.0], 1.0).unwrap();
        let p = ExtensionParams::new(1, 3.0).unwrap();
        let direct = local_smoothing_spacetime(&f, &phi, &p).unwrap();
        let exact = local_smoothing_functional(&f, &phi, &p).unwrap().value;
        let got = direct.value + direct.tail_bound;
        assert!((got - exact).abs() < 1e-3 * exact, "{got} vs {exact}");
    }

    #[test]
    fn smoothing_two_dimensional_scaling() {
        // f̂ -> λ^{-1} f̂(·/λ) together with φ -> φ(λ·) divides the functional by λ
        let grid = FrequencyGrid::new(2, 16.0, 128).unwrap();
        let p = ExtensionParams::new(2, 3.0).unwrap();
        let f1 = make_gaussian(grid, &[0.0, 0.0], 2.0).unwrap();
        let f2 = make_gaussian(grid, &[0.0, 0.0], 4.0).unwrap();
        let a = local_smoothing_functional(&f1, &GaussianWeight::new(1.0).unwrap(), &p).unwrap().value;
        let b = local_smoothing_functional(&f2, &GaussianWeight::new(0.5).unwrap(), &p).unwrap().value;
        assert!((a - 2.0 * b).abs() < 1e-6 * a, "{a} vs {b}");
    }

    #[test]
    fn smoothing_two_dimensional_matches_spacetime_quadrature() {
        let grid = FrequencyGrid::new(2, 16.0, 512).unwrap();
        let phi = GaussianWeight::new(1.0).unwrap();
        let f = make_gaussian(grid, &[6.0, 0.0], 1.0).unwrap();
        let p = ExtensionParams::new(2, 3.0).unwrap();
        let direct = local_smoothing_spacetime(&f, &phi, &p).unwrap();
        let exact = local_smoothing_functional(&f, &phi, &p).unwrap().value;
        let got = direct.value + direct.tail_bound;
        assert!((got - exact).abs() < 1e-2 * exact, "{got} vs {exact}");
    }

    #[test]
    fn smoothing_is_quadratic() {
        let grid = FrequencyGrid::new(1, 32.0, 2048).unwrap();
        let f = make_gaussian(grid, &[4.0], 2.0).unwrap();
        let p = ExtensionParams::new(1, 3.0).unwrap();
        let phi = GaussianWeight::new(1.0).unwrap();
        let a = local_smoothing_functional(&f, &phi, &p).unwrap().value;
        let b = local_smoothing_functional(&f.scaled(Complex64::new(2.0, 0.0)), &phi, &p).unwrap().value;
        assert!((b - 4.0 * a).abs() < 1e-12 * b);
    }

    #[test]
    fn sphere_kernel_against_bessel_form() {
        // ρ π w² · 2π e^{-x} I₀(x), x = w²ρ²/2
        let phi = GaussianWeight::new(1.0).unwrap();
        let x: f64 = 0.5;
        let mut i0 = 0.0;
        let mut term = 1.0;
        for k in 1..40 {
            i0 += term;
            term *= (x / 2.0).powi(2) / (k * k) as f64;
        }
        let exact = PI * 2.0 * PI * (-x).exp() * i0;
        assert!((sphere_kernel_value(&phi, 1.0, 1024) - exact).abs() < 1e-12 * exact);
        assert!((sphere_kernel_value(&phi, 1.0, 8192) - exact).abs() < 1e-12 * exact);
        let rep = sphere_kernel_decay(&phi, &[4.0, 8.0, 16.0, 32.0], 8192).unwrap();
        assert!(rep.slope <= 0.05, "{rep:?}");
        let big = GaussianWeight::new(1.0).unwrap();
        let _ = big;
    }
}
