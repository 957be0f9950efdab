use fracext::geometry::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sectors(alpha: f64) -> SectorDecomposition {
    let config = DecompositionConfig::for_alpha(2, alpha, 7).unwrap();
    build_sectors(1.0, &config)
}

#[test]
fn hessian_positive_in_every_sector() {
    for alpha in [2.5, 3.0, 5.0] {
        let s = sectors(alpha);
        let scan = hessian_bounds_scan(&s, alpha, 100_000, 1);
        assert!(scan.min_eig > 0.0, "α={alpha}: {}", scan.min_eig);
        assert!(scan.per_sector_min.iter().all(|&m| m > 0.0));
        assert_eq!(scan.a1_violations, 0, "α={alpha}: {:?}", scan.a1_witness);
        assert!(scan.quad_form_min >= 0.5, "α={alpha}: {}", scan.quad_form_min);
    }
}

/// Depth-2 decomposition: at depth 4 related cubes sit about 2^4/r apart, which leaves a
/// single sector without pairs at r = 16.
fn shallow() -> SectorDecomposition {
    build_sectors(1.0, &DecompositionConfig::minimal(2, 2, THETA_BAR_CAP).unwrap())
}

fn busiest_sector(s: &SectorDecomposition, r: u64) -> usize {
    (0..s.sectors.len())
        .max_by_key(|&j| related_pairs_in_sector(s, j, r, s.config.n_whitney).unwrap().len())
        .unwrap()
}

#[test]
fn gap_ratio_is_stable_across_scales() {
    let s = shallow();
    let j = busiest_sector(&s, 16);
    let ratios: Vec<f64> = [16u64, 32, 64]
        .iter()
        .map(|&r| {
            let pairs = related_pairs_in_sector(&s, j, r, s.config.n_whitney).unwrap();
            assert!(!pairs.is_empty());
            let g = sumset_gap_stats(&pairs, 3.0, 4, 2);
            assert!(g.min > 0.0);
            g.ratio
        })
        .collect();
    for w in ratios.windows(2) {
        let q = w[1] / w[0];
        assert!((1.0 / 1.5..=1.5).contains(&q), "{ratios:?}");
    }
}

#[test]
fn center_estimates_are_two_sided() {
    let s = shallow();
    let j = busiest_sector(&s, 16);
    for r in [16u64, 32] {
        let pairs = related_pairs_in_sector(&s, j, r, s.config.n_whitney).unwrap();
        let c = center_estimates(&pairs, 4, 3);
        assert!(c.center_low > 0.0 && c.center_high.is_finite());
    }
}

#[test]
fn overlaps_are_finite_and_stable() {
    let s = shallow();
    let j = busiest_sector(&s, 16);
    let count = |r| {
        let pairs = related_pairs_in_sector(&s, j, r, s.config.n_whitney).unwrap();
        let g = sumset_gap_stats(&pairs, 3.0, 4, 5);
        overlap_count(&pairs, &pairs, g.min, g.max)
    };
    let a = count(16);
    let b = count(32);
    assert!(a.min_count >= 1 && a.max_count < a.pairs_r, "{a:?}");
    let q = b.max_count as f64 / a.max_count as f64;
    assert!((0.5..=2.0).contains(&q), "{} vs {}", b.max_count, a.max_count);
}

#[test]
fn overlaps_vanish_across_distant_scales() {
    let s = shallow();
    let j = busiest_sector(&s, 8);
    let p8 = related_pairs_in_sector(&s, j, 8, 2).unwrap();
    let p128 = related_pairs_in_sector(&s, j, 128, 2).unwrap();
    assert!(!p8.is_empty() && !p128.is_empty());
    let g = sumset_gap_stats(&p8, 3.0, 4, 5);
    assert_eq!(overlap_count(&p8, &p128, g.min, g.max).max_count, 0);
}

#[test]
fn levelset_ratio_bounds() {
    for alpha in [2.5, 3.0] {
        let r = levelset_ratio(alpha, 100_000, 4);
        assert!(r.within_bounds(), "{r:?}");
    }
}

#[test]
fn levelset_ratio_limit_along_the_axis() {
    // on y = 0 the numerator is ((1+x) - (1+x)^{2-α})², so the ratio tends to (α-1)²
    for alpha in [2.5, 3.0, 5.0] {
        let v = levelset_ratio_at(alpha, 1e-7, 0.0);
        assert!((v - (alpha - 1.0f64).powi(2)).abs() < 1e-5, "α={alpha}: {v}");
    }
}

#[test]
fn whitney_pairs_are_unique() {
    let s = sectors(3.0);
    let n_w = s.config.n_whitney;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checked = 0;
    while checked < 10_000 {
        let j = rng.random_range(0..s.sectors.len());
        let a = s.sample(j, &mut rng);
        let b = s.sample(j, &mut rng);
        if a == b {
            continue;
        }
        let hits = (1..=24)
            .filter(|&e| {
                let r = 1u64 << e;
                match (
                    DyadicCube::containing(2, 1.0, r, a),
                    DyadicCube::containing(2, 1.0, r, b),
                ) {
                    (Some(x), Some(y)) => whitney_related(&x, &y, n_w),
                    _ => false,
                }
            })
            .count();
        assert_eq!(hits, 1, "{a:?} {b:?}");
        checked += 1;
    }
}

#[test]
fn comparability_bracket() {
    let r = levelset_comparability(3.0, [200.0, 0.0], [20.0 / 2f64.sqrt(), 20.0 / 2f64.sqrt()], 2, 64).unwrap();
    assert!(r.ratios.iter().any(|&x| (x - 1.0).abs() < 1e-9));
    assert!(r.min_ratio >= 0.25 && r.max_ratio <= 4.0, "{r:?}");
    assert!(r.max_residual < 1e-10);
}
