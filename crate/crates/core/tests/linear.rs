#![allow(clippy::needless_range_loop)]

mod common;

use glc_core::linear::{sweep_threshold, LDA_RIDGE};
use glc_core::{evaluate, fit_glc_lda, fit_lda, make_glc_model, ClassRoles, Dataset, GlcModel, Role};
use proptest::prelude::*;

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

fn lda_oracle(d: &Dataset, roles: &ClassRoles) -> Vec<f64> {
    let n = d.n_attributes();
    let group = |label: &str| -> Vec<&[f64]> {
        (0..d.len()).filter(|&i| d.label(i) == label).map(|i| d.point(i)).collect()
    };
    let (g1, g2) = (group(&roles.class1), group(&roles.class2));
    let mean = |g: &[&[f64]]| -> Vec<f64> {
        (0..n).map(|j| g.iter().map(|p| p[j]).sum::<f64>() / g.len() as f64).collect()
    };
    let (m1, m2) = (mean(&g1), mean(&g2));
    let mut s = vec![vec![0.0; n]; n];
    for (g, m) in [(&g1, &m1), (&g2, &m2)] {
        for p in g.iter() {
            for i in 0..n {
                for j in 0..n {
                    s[i][j] += (p[i] - m[i]) * (p[j] - m[j]);
                }
            }
        }
    }
    let dof = (g1.len() + g2.len() - 2) as f64;
    for (i, row) in s.iter_mut().enumerate() {
        for v in row.iter_mut() {
            *v /= dof;
        }
        row[i] += LDA_RIDGE;
    }
    solve(s, (0..n).map(|j| m2[j] - m1[j]).collect())
}

fn best_count_oracle(u: &[f64], roles: &[Role]) -> usize {
    let mut cuts: Vec<f64> = u.to_vec();
    cuts.push(f64::INFINITY);
    cuts.push(f64::NEG_INFINITY);
    cuts.iter()
        .map(|&t| {
            u.iter()
                .zip(roles)
                .filter(|(v, r)| (**v < t) == (**r == Role::Class1))
                .count()
        })
        .max()
        .unwrap()
}

proptest! {
    #[test]
    fn sweep_finds_the_best_cut(
        pts in prop::collection::vec((-5.0f64..5.0, any::<bool>()), 1..60),
        snap in any::<bool>(),
    ) {
        let u: Vec<f64> = pts.iter().map(|p| if snap { p.0.round() } else { p.0 }).collect();
        let roles: Vec<Role> = pts.iter().map(|p| if p.1 { Role::Class1 } else { Role::Class2 }).collect();
        let choice = sweep_threshold(&u, &roles);
        prop_assert_eq!(choice.correct, best_count_oracle(&u, &roles));
        let at_choice = u.iter().zip(&roles).filter(|(v, r)| (**v < choice.threshold) == (**r == Role::Class1)).count();
        prop_assert_eq!(at_choice, choice.correct);
        prop_assert!((choice.accuracy - choice.correct as f64 / u.len() as f64).abs() < 1e-15);
    }

    #[test]
    fn scaling_coefficients_changes_nothing(
        c in prop::collection::vec(-1.0f64..1.0, 1..8).prop_filter("nonzero", |c| c.iter().any(|v| v.abs() > 1e-3)),
        lambda in 0.01f64..100.0,
        t in -1.0f64..1.0,
    ) {
        let roles = ClassRoles::new("a", "b");
        let a = GlcModel::from_coefficients(c.clone(), t, roles.clone()).unwrap();
        let b = GlcModel::from_coefficients(c.iter().map(|v| v * lambda).collect(), t, roles).unwrap();
        for (x, y) in a.k().iter().zip(b.k()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        prop_assert!((a.raw_threshold() * lambda - b.raw_threshold()).abs() < 1e-9 * lambda.max(1.0));
    }
}

#[test]
fn lda_matches_direct_solve() {
    for d in [common::wbc(), common::ionosphere(), common::iris2()] {
        let roles = ClassRoles::from_dataset(&d).unwrap();
        let c = fit_lda(&d, &roles).unwrap();
        let o = lda_oracle(&d, &roles);
        let scale = o.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (a, b) in c.iter().zip(&o) {
            assert!((a - b).abs() <= 1e-6 * scale, "{}: {a} vs {b}", d.name());
        }
    }
}

#[test]
fn wbc_training_accuracy() {
    let d = common::wbc();
    let m = fit_glc_lda(&d, &ClassRoles::from_dataset(&d).unwrap()).unwrap();
    let r = evaluate(&m, &d).unwrap();
    assert!(r.accuracy >= 0.96, "{}", r.accuracy);
    assert_eq!(r.confusion.iter().flatten().sum::<usize>(), 683);
}

#[test]
fn ionosphere_training_accuracy() {
    let d = common::ionosphere();
    let m = fit_glc_lda(&d, &ClassRoles::from_dataset(&d).unwrap()).unwrap();
    let a = evaluate(&m, &d).unwrap().accuracy;
    assert!((0.85..=0.95).contains(&a), "{a}");
}

#[test]
fn iris_two_class_is_not_linear() {
    let d = common::iris2();
    let m = fit_glc_lda(&d, &ClassRoles::from_dataset(&d).unwrap()).unwrap();
    let a = evaluate(&m, &d).unwrap().accuracy;
    assert!((0.60..=0.85).contains(&a), "{a}");
}

#[test]
fn angle_edit_keeps_sign_and_projection_identity() {
    let d = common::wbc();
    let roles = ClassRoles::from_dataset(&d).unwrap();
    let c = fit_lda(&d, &roles).unwrap();
    let m = make_glc_model(c, &d, &roles).unwrap();
    let edited = m.with_angle(2, 0.3).unwrap();
    assert_eq!(edited.signs()[2], m.signs()[2]);
    assert!((edited.k()[2].abs() - 0.3f64.cos()).abs() < 1e-15);
    let x = d.point(5);
    let by_hand: f64 = edited.k().iter().zip(x).map(|(k, v)| k * v).sum();
    assert!((edited.project(x).unwrap() - by_hand).abs() < 1e-12);
    assert!(m.with_angle(2, 2.0).is_err());
}
