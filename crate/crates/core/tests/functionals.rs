use fracext::functionals::*;
use fracext::geometry::DyadicCube;
use fracext::propagator::extension_field;
use fracext::{make_gaussian, ExtensionParams, FrequencyGrid, TimeGrid, TrialFunction};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sum of three Gaussian bumps with random centers, widths and phases.
fn random_trial(grid: FrequencyGrid, rng: &mut ChaCha8Rng, spread: f64, widths: (f64, f64)) -> TrialFunction {
    let d = grid.d;
    let bumps: Vec<([f64; 2], f64, Complex64)> = (0..3)
        .map(|_| {
            let c = [rng.random_range(-spread..spread), if d == 2 { rng.random_range(-spread..spread) } else { 0.0 }];
            let w = rng.random_range(widths.0..widths.1);
            let a = Complex64::from_polar(rng.random_range(0.3..1.0), rng.random_range(0.0..std::f64::consts::TAU));
            (c, w, a)
        })
        .collect();
    TrialFunction::from_fn(grid, |x| {
        bumps
            .iter()
            .map(|(c, w, a)| {
                let r2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2);
                a * (-r2 / (2.0 * w * w)).exp()
            })
            .sum()
    })
    .unwrap()
}

#[test]
fn random_trials_stay_below_the_one_dimensional_constant() {
    let grid = FrequencyGrid::default_for(1).unwrap();
    let p = ExtensionParams::new(1, 2.0).unwrap();
    let ceiling = 12f64.powf(-1.0 / 12.0) + 2e-3;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let f = random_trial(grid, &mut rng, 12.0, (1.0, 4.0));
        let q = strichartz_quotient(&f, &p, QuotientOptions::default()).unwrap();
        assert!(q.value <= ceiling, "{}", q.value);
    }
}

#[test]
fn random_trials_stay_below_the_two_dimensional_constant() {
    let grid = FrequencyGrid::new(2, 8.0, 128).unwrap();
    let p = ExtensionParams::new(2, 2.0).unwrap();
    let ceiling = 0.5f64.sqrt() + 5e-3;
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let opts = QuotientOptions {
        time_nodes: 129,
        refine: false,
    };
    for _ in 0..6 {
        let f = random_trial(grid, &mut rng, 3.0, (0.8, 1.6));
        let q = strichartz_quotient(&f, &p, opts).unwrap();
        assert!(q.value <= ceiling, "{}", q.value);
    }
}

#[test]
fn gaussian_baselines_and_refinement() {
    let grid = FrequencyGrid::default_for(1).unwrap();
    let f = fracext::trial::default_gaussian(grid).unwrap();
    let p = ExtensionParams::new(1, 2.0).unwrap();
    let opts = QuotientOptions {
        refine: true,
        ..QuotientOptions::default()
    };
    let q = strichartz_quotient(&f, &p, opts).unwrap();
    assert!((q.value - 12f64.powf(-1.0 / 12.0)).abs() < 1e-3);
    assert!(q.refinement_delta.unwrap() < 2e-3 * q.value);
    let json = serde_json::to_value(&q).unwrap();
    for key in ["value", "q", "grid", "tail_bound", "refinement_delta", "wall_time_ms"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}

#[test]
fn discrete_holder_inequality() {
    let grid = FrequencyGrid::new(1, 16.0, 1024).unwrap();
    let f = make_gaussian(grid, &[1.0], 2.0).unwrap();
    for alpha in [2.0, 3.0] {
        let p = ExtensionParams::new(1, alpha).unwrap();
        let times = TimeGrid::sinh_mapped(0.05, 4.0, 129).unwrap();
        let u = extension_field(&f, times, &p);
        let lq = spacetime_norm(&u, p.q0).unwrap().value.powf(p.q0);
        let l2 = spacetime_norm(&u, 2.0).unwrap().value.powi(2);
        let sup = spacetime_sup(&u);
        assert!(lq <= sup.powf(p.q0 - 2.0) * l2 * (1.0 + 1e-12), "α={alpha}");
    }
}

#[test]
fn local_smoothing_is_uniform_in_frequency() {
    let grid = FrequencyGrid::new(1, 32.0, 2048).unwrap();
    let phi = GaussianWeight::new(1.0).unwrap();
    let p = ExtensionParams::new(1, 3.0).unwrap();
    let base = make_gaussian(grid, &[0.0], 1.0).unwrap();
    let mut vals: Vec<f64> = [0.0, 4.0, 8.0, 16.0]
        .iter()
        .map(|&k| {
            let f = base.modulate(&[k]).unwrap();
            local_smoothing_functional(&f, &phi, &p).unwrap().value / f.l2_norm().powi(2)
        })
        .collect();
    vals.sort_by(f64::total_cmp);
    let median = 0.5 * (vals[1] + vals[2]);
    assert!(vals.iter().all(|v| v / median < 4.0 && median / v < 4.0), "{vals:?}");
}

#[test]
fn sphere_kernel_is_bounded() {
    let phi = GaussianWeight::new(1.0).unwrap();
    let r = sphere_kernel_decay(&phi, &[4.0, 8.0, 16.0, 32.0], 1024).unwrap();
    assert!(r.slope <= 0.05, "{}", r.slope);
    // the 1024-point circle rule against an 8192-point reference
    let fine = sphere_kernel_value(&phi, 1.0, 8192);
    assert!((sphere_kernel_value(&phi, 1.0, 1024) - fine).abs() < 1e-12 * fine);
}

#[test]
fn bilinear_ratio_is_stable_across_scales() {
    let grid = FrequencyGrid::new(2, 2.5, 256).unwrap();
    let p = ExtensionParams::new(2, 3.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = random_trial(grid, &mut rng, 2.0, (0.6, 1.2));
    let ratios: Vec<f64> = [8i64, 16, 32]
        .iter()
        .map(|&r| {
            // depth-1 related pair: index distance 2, parents adjacent
            let a = DyadicCube::new(2, 1.0, r as u64, &[r, 0]).unwrap();
            let b = DyadicCube::new(2, 1.0, r as u64, &[r + 2, 0]).unwrap();
            assert!(fracext::geometry::whitney_related(&a, &b, 1));
            let rep = bilinear_ratio(&f, &a, &b, 1.9, &p).unwrap();
            assert!(rep.ratio.is_finite() && rep.ratio > 0.0);
            rep.ratio
        })
        .collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(hi / lo < 3.0, "{ratios:?}");
}

#[test]
fn cube_sup_controls_the_strichartz_norm() {
    let grid = FrequencyGrid::new(1, 16.0, 512).unwrap();
    let p = ExtensionParams::new(1, 3.0).unwrap();
    let family = dyadic_family(&grid, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let f = random_trial(grid, &mut rng, 6.0, (1.0, 3.0));
        let lhs = strichartz_quotient(&f, &p, QuotientOptions::default()).unwrap().value * f.l2_norm();
        let sup = cube_sup_quantity(&f, p.alpha, &family, 65).unwrap().value;
        assert!(lhs <= 10.0 * sup.powf(0.1) * f.l2_norm().powf(0.9));
    }
    let zero = TrialFunction::zeros(grid);
    assert_eq!(cube_sup_quantity(&zero, 3.0, &family, 65).unwrap().value, 0.0);
}
