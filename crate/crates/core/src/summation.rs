//! Order-fixed summation so results do not depend on the thread count.

/// Pairwise (cascade) sum with a fixed split pattern.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if xs.len() <= BLOCK {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Neumaier compensated sum over an iterator, evaluated in order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Sum of |z|^q over a slice, pairwise. `q == 2` avoids the power call.
pub fn sum_abs_pow(zs: &[num_complex::Complex64], q: f64) -> f64 {
    const BLOCK: usize = 64;
    if zs.len() <= BLOCK {
        let mut s = 0.0;
        if q == 2.0 {
            for z in zs {
                s += z.norm_sqr();
            }
        } else if q == 4.0 {
            for z in zs {
                let n = z.norm_sqr();
                s += n * n;
            }
        } else if q == 6.0 {
            for z in zs {
                let n = z.norm_sqr();
                s += n * n * n;
            }
        } else {
            let h = q / 2.0;
            for z in zs {
                s += z.norm_sqr().powf(h);
            }
        }
        return s;
    }
    let mid = zs.len() / 2;
    sum_abs_pow(&zs[..mid], q) + sum_abs_pow(&zs[mid..], q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_exact_integers() {
        let xs: Vec<f64> = (1..=10_000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 50_005_000.0);
    }

    #[test]
    fn compensated_recovers_small_terms() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(xs), 2.0);
    }

    #[test]
    fn abs_pow_special_cases_agree_with_powf() {
        let zs: Vec<_> = (0..300)
            .map(|i| num_complex::Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos()))
            .collect();
        for q in [2.0, 4.0, 6.0] {
            let direct: f64 = zs.iter().map(|z| z.norm().powf(q)).sum();
            assert!((sum_abs_pow(&zs, q) - direct).abs() < 1e-10 * direct);
        }
    }
}
