#![allow(clippy::needless_range_loop)]

mod common;

use glc_core::pca::{pca_augment, principal_components, PcaAugmentation};
use glc_core::{binarize, normalize_minmax, BinarizationSpec, Dataset};
use proptest::prelude::*;

/// Cyclic Jacobi eigenvalue iteration for a symmetric matrix.
fn jacobi(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as u8 as f64).collect()).collect();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

fn covariance(d: &Dataset) -> Vec<Vec<f64>> {
    let n = d.n_attributes();
    let rows = d.len() as f64;
    let mean: Vec<f64> = (0..n).map(|j| d.points().iter().map(|p| p[j]).sum::<f64>() / rows).collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| d.points().iter().map(|p| (p[i] - mean[i]) * (p[j] - mean[j])).sum::<f64>() / (rows - 1.0))
                .collect()
        })
        .collect()
}

#[test]
fn fixture_shapes() {
    let wbc = common::raw("wbc.csv", "class");
    assert_eq!((wbc.len(), wbc.n_attributes()), (683, 9));
    let counts = wbc.class_counts();
    assert_eq!((counts["benign"], counts["malignant"]), (444, 239));

    let ion = common::raw("ionosphere.csv", "class");
    assert_eq!((ion.len(), ion.n_attributes()), (351, 34));
    let counts = ion.class_counts();
    assert_eq!((counts["g"], counts["b"]), (225, 126));

    let iris = common::raw("iris.csv", "species");
    assert_eq!((iris.len(), iris.n_attributes()), (150, 4));
    assert!(iris.class_counts().values().all(|&c| c == 50));
}

#[test]
fn iris_super_class() {
    let iris = common::iris();
    let two = binarize(&iris, &BinarizationSpec::new("versicolor", "combined")).unwrap();
    let counts = two.class_counts();
    assert_eq!((counts["versicolor"], counts["combined"]), (50, 100));
    assert_eq!(two.points(), iris.points());
    assert!(binarize(&iris, &BinarizationSpec::new("rosa", "rest")).is_err());
}

#[test]
fn three_class_seeds_like_super_class() {
    let labels: Vec<String> = (0..210).map(|i| ["kama", "rosa", "canadian"][i / 70].to_string()).collect();
    let points = (0..210).map(|i| vec![(i % 70) as f64 / 70.0, (i / 70) as f64]).collect();
    let d = common::dataset(points, labels);
    let two = binarize(&d, &BinarizationSpec::new("rosa", "other")).unwrap();
    let counts = two.class_counts();
    assert_eq!((counts["rosa"], counts["other"]), (70, 140));
}

#[test]
fn pca_agrees_with_jacobi() {
    for d in [common::wbc(), common::iris()] {
        let (_, comps, vals) = principal_components(&d);
        let (mut ovals, ovecs) = jacobi(covariance(&d));
        let mut order: Vec<usize> = (0..ovals.len()).collect();
        order.sort_by(|&a, &b| ovals[b].total_cmp(&ovals[a]));
        let sorted: Vec<f64> = order.iter().map(|&i| ovals[i]).collect();
        for (a, b) in vals.iter().zip(&sorted) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        ovals = sorted;
        let n = comps.len();
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = comps[i].iter().zip(&comps[j]).map(|(a, b)| a * b).sum();
                assert!((dot - (i == j) as u8 as f64).abs() < 1e-9);
            }
            // leading directions are well separated, so they match up to sign
            if i < 2 && ovals[i] - ovals[i + 1] > 1e-3 {
                let o: Vec<f64> = ovecs.iter().map(|row| row[order[i]]).collect();
                let dot: f64 = comps[i].iter().zip(&o).map(|(a, b)| a * b).sum();
                assert!((dot.abs() - 1.0).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn pca_scores_are_uncorrelated() {
    let d = common::wbc();
    let (aug, fitted) = pca_augment(&d, &PcaAugmentation::with_components(3)).unwrap();
    assert_eq!(aug.n_attributes(), 12);
    let scores: Vec<Vec<f64>> = d.points().iter().map(|p| fitted.scores(p)).collect();
    let s = common::dataset(scores, d.labels().to_vec());
    let cov = covariance(&s);
    for i in 0..3 {
        assert!((cov[i][i] - fitted.eigenvalues[i]).abs() < 1e-9);
        for j in 0..3 {
            if i != j {
                assert!(cov[i][j].abs() < 1e-9);
            }
        }
    }
}

proptest! {
    #[test]
    fn normalization_round_trip(
        rows in prop::collection::vec(prop::collection::vec(-100.0f64..100.0, 3), 2..30),
    ) {
        let labels = (0..rows.len()).map(|i| if i % 2 == 0 { "a".to_string() } else { "b".to_string() }).collect();
        let d = common::dataset(rows.clone(), labels);
        let n = normalize_minmax(&d);
        prop_assert!(n.points().iter().flatten().all(|v| (0.0..=1.0).contains(v)));
        let twice = normalize_minmax(&n);
        prop_assert_eq!(twice.points(), n.points());
        prop_assert_eq!(twice.norm_params(), n.norm_params());
        for (p, raw) in n.points().iter().zip(&rows) {
            let back = n.denormalize_point(p).unwrap();
            let (lo_hi, _) = (n.norm_params().unwrap(), ());
            for ((b, r), (lo, hi)) in back.iter().zip(raw).zip(lo_hi) {
                if hi > lo {
                    prop_assert!((b - r).abs() <= 1e-9 * (1.0 + r.abs()));
                }
            }
            let again = n.normalize_point(raw).unwrap();
            for (a, q) in again.iter().zip(p) {
                prop_assert!((a - q).abs() <= 1e-12);
            }
        }
    }
}
