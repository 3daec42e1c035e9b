use combicov_core::derive::{fit_projection, fit_quantile_bins, GridPartition};
use proptest::prelude::*;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Covariance-free power iteration on `X^T X`, deflating the first component
/// for the second. Independent of the library's eigendecomposition.
fn power_components(rows: &[Vec<f64>]) -> [Vec<f64>; 2] {
    let d = rows[0].len();
    let n = rows.len() as f64;
    let mean: Vec<f64> = (0..d)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n)
        .collect();
    let centred: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().zip(&mean).map(|(x, m)| x - m).collect())
        .collect();
    let apply = |v: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; d];
        for row in &centred {
            let s = dot(row, v);
            for (o, x) in out.iter_mut().zip(row) {
                *o += s * x;
            }
        }
        out
    };
    let mut found: Vec<Vec<f64>> = Vec::new();
    for _ in 0..2 {
        let mut v: Vec<f64> = (0..d).map(|i| 1.0 + 0.37 * i as f64).collect();
        for _ in 0..10_000 {
            let mut w = apply(&v);
            for prev in &found {
                let p = dot(&w, prev);
                w.iter_mut().zip(prev).for_each(|(x, q)| *x -= p * q);
            }
            let norm = dot(&w, &w).sqrt();
            w.iter_mut().for_each(|x| *x /= norm);
            let delta: f64 = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
            v = w;
            if delta < 1e-13 {
                break;
            }
        }
        found.push(v);
    }
    [found[0].clone(), found[1].clone()]
}

fn sign_aligned(a: &[f64], b: &[f64]) -> f64 {
    let same: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let flipped: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x + y).abs())
        .fold(0.0, f64::max);
    same.min(flipped)
}

#[test]
fn components_agree_with_power_iteration() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(5);
    for _ in 0..40 {
        let d = rng.gen_range(2..=8);
        let scales: Vec<f64> = (0..d).map(|i| 4.0 / (1.0 + i as f64 * 1.3)).collect();
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|_| {
                scales
                    .iter()
                    .map(|s| s * rng.gen_range(-1.0..1.0))
                    .collect()
            })
            .collect();
        let fitted = fit_projection(&rows).unwrap();
        let [c1, c2] = power_components(&rows);
        assert!(
            sign_aligned(&fitted.components[0], &c1) < 1e-6,
            "{:?} vs {c1:?}",
            fitted.components[0]
        );
        assert!(sign_aligned(&fitted.components[1], &c2) < 1e-6);
        assert!(fitted.explained_variance[0] >= fitted.explained_variance[1]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn assign_bin_is_monotone(
        values in prop::collection::vec(-1e3f64..1e3, 1..60),
        mut probes in prop::collection::vec(-2e3f64..2e3, 2..30),
    ) {
        let bins = fit_quantile_bins(&values, &[0.25, 0.5, 0.75]).unwrap();
        prop_assert!(bins.edges.windows(2).all(|w| w[0] <= w[1]));
        probes.sort_by(f64::total_cmp);
        let assigned: Vec<usize> = probes.iter().map(|&x| bins.assign_bin(x).unwrap()).collect();
        prop_assert!(assigned.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(assigned.iter().all(|&b| b < 4));
    }

    #[test]
    fn quartile_bins_are_balanced(raw in prop::collection::hash_set(-100_000i64..100_000, 4..200)) {
        let values: Vec<f64> = raw.into_iter().map(|v| v as f64).collect();
        let n = values.len() as f64;
        let bins = fit_quantile_bins(&values, &[0.25, 0.5, 0.75]).unwrap();
        let mut counts = [0usize; 4];
        for &x in &values {
            counts[bins.assign_bin(x).unwrap()] += 1;
        }
        // Brute-force count against each bin's share of the sample.
        for &c in &counts {
            prop_assert!((c as f64 - n / 4.0).abs() <= 1.0 + 1e-9, "{counts:?} for n={n}");
        }
    }

    #[test]
    fn regions_tile_the_square(x in 0.0f64..=1.0, y in 0.0f64..=1.0, n in 1u32..12) {
        let grid = GridPartition::new(n).unwrap();
        let id = grid.region_of(x, y).unwrap();
        prop_assert!(id < n * n);
        let col = id % n;
        let row = id / n;
        let w = 1.0 / n as f64;
        prop_assert!(x >= col as f64 * w - 1e-12 && (x < (col + 1) as f64 * w + 1e-12 || col == n - 1));
        prop_assert!(y >= row as f64 * w - 1e-12 && (y < (row + 1) as f64 * w + 1e-12 || row == n - 1));
    }

    #[test]
    fn projection_is_orthonormal_and_scales_fitting_set(
        rows in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 3), 5..40)
    ) {
        let Ok(p) = fit_projection(&rows) else { return Ok(()); };
        for c in &p.components {
            prop_assert!((dot(c, c) - 1.0).abs() < 1e-9);
        }
        prop_assert!(dot(&p.components[0], &p.components[1]).abs() < 1e-9);
        prop_assert!(p.explained_variance[0] >= p.explained_variance[1]);
        let scaled = p.project_and_scale(&rows).unwrap();
        for axis in 0..2 {
            let coords: Vec<f64> = scaled.iter().map(|s| if axis == 0 { s.0 } else { s.1 }).collect();
            prop_assert!(coords.iter().all(|c| (0.0..=1.0).contains(c)));
            if p.axis_max[axis] > p.axis_min[axis] {
                prop_assert!(coords.contains(&0.0));
                prop_assert!(coords.contains(&1.0));
            }
        }
    }
}
