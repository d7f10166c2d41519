mod common;

use glc_core::kernel::{
    expand_dataset, glc_nl_fit, glc_nl_from_support_vectors, load_support_vectors, smo::fit_svm, smo::SvmConfig,
    CoefficientSource, GlcNlConfig, KernelConfig, KernelKind,
};
use glc_core::{evaluate, fit_glc_lda, ClassRoles, Dataset};

fn xor() -> Dataset {
    common::dataset(
        vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]],
        ["a", "a", "b", "b"].map(String::from).to_vec(),
    )
}

fn roles() -> ClassRoles {
    ClassRoles::new("a", "b")
}

fn accuracy(d: &Dataset, predict: impl Fn(&[f64]) -> String) -> f64 {
    (0..d.len()).filter(|&i| predict(d.point(i)) == d.label(i)).count() as f64 / d.len() as f64
}

#[test]
fn xor_dual_matches_closed_form() {
    // by symmetry every α is equal; W(a) = 4a − a²S/2 with S = Σ y_i y_j K_ij
    let g = 0.5f64;
    let s = 4.0 + 4.0 * (-2.0 * g).exp() - 8.0 * (-g).exp();
    let a_star = 4.0 / s;

    // brute-force the one-dimensional dual on a fine grid
    let w = |a: f64| 4.0 * a - 0.5 * a * a * s;
    let grid_best = (0..=200_000).map(|i| i as f64 * 1e-4).max_by(|x, y| w(*x).total_cmp(&w(*y))).unwrap();
    assert!((grid_best - a_star).abs() < 1e-3);

    let mut cfg = SvmConfig::new(KernelConfig::rbf().with_gamma(g));
    cfg.c = 100.0;
    cfg.tol = 1e-6;
    let svs = fit_svm(&xor(), &roles(), &cfg).unwrap();
    assert_eq!(svs.len(), 4);
    for a in &svs.alphas {
        assert!((a - a_star).abs() / a_star < 1e-3, "{a} vs {a_star}");
    }
    assert!(svs.bias.abs() < 1e-3);
}

#[test]
fn xor_needs_the_kernel() {
    let d = xor();
    // every line through the plane, swept over directions and cut points
    let mut best_linear = 0.0f64;
    for step in 0..3600 {
        let th = step as f64 * std::f64::consts::PI / 1800.0;
        let u: Vec<f64> = d.points().iter().map(|p| th.cos() * p[0] + th.sin() * p[1]).collect();
        let mut cuts = u.clone();
        cuts.push(f64::INFINITY);
        for t in cuts {
            let acc = accuracy(&d, |p| {
                let v = th.cos() * p[0] + th.sin() * p[1];
                if v < t { "a".into() } else { "b".into() }
            });
            best_linear = best_linear.max(acc);
        }
    }
    assert_eq!(best_linear, 0.75);
    let lda = fit_glc_lda(&d, &roles());
    if let Ok(m) = lda {
        assert!(evaluate(&m, &d).unwrap().accuracy <= 0.75);
    }
    let fit = glc_nl_fit(&d, &roles(), &GlcNlConfig::new(KernelConfig::rbf().with_gamma(0.5))).unwrap();
    assert_eq!(accuracy(&d, |p| fit.predict(p).unwrap().to_string()), 1.0);
}

#[test]
fn poly_feature_table() {
    let d = common::dataset(
        vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0], vec![0.5, 0.5]],
        ["a", "a", "b", "b", "a"].map(String::from).to_vec(),
    );
    let csv = "x1,x2,alpha\n1.0,0.0,-0.5\n0.0,1.0,0.5\n";
    let svs = load_support_vectors(csv.as_bytes(), KernelConfig::poly().with_gamma(0.5)).unwrap();
    assert_eq!(svs.signs, vec![-1.0, 1.0]);
    // (0.5·x·sv + 1)^3
    let table = [[1.0, 1.0], [3.375, 1.0], [1.0, 3.375], [3.375, 3.375], [1.25f64.powi(3), 1.25f64.powi(3)]];
    let e = expand_dataset(&d, &svs).unwrap();
    assert_eq!(e.attributes(), ["sv1", "sv2"]);
    for (row, want) in e.points().iter().zip(table) {
        for (a, b) in row.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }
    let fit = glc_nl_from_support_vectors(&d, &roles(), svs, CoefficientSource::DualCoefficients).unwrap();
    assert_eq!(fit.model.n_attributes(), 2);
    assert!(fit.model.signs()[0] < 0.0 && fit.model.signs()[1] > 0.0);
}

#[test]
fn kernel_parsing() {
    assert_eq!("rbf".parse::<KernelKind>().unwrap(), KernelKind::Rbf);
    assert_eq!("POLY".parse::<KernelKind>().unwrap(), KernelKind::Poly);
    assert!("sigmoid".parse::<KernelKind>().is_err());
    assert!(load_support_vectors("x1,alpha\n0.1,0\n".as_bytes(), KernelConfig::rbf()).is_err());
}

#[test]
fn iris_rbf_beats_linear() {
    let d = common::iris2();
    let r = ClassRoles::from_dataset(&d).unwrap();
    let fit = glc_nl_fit(&d, &r, &GlcNlConfig::new(KernelConfig::rbf())).unwrap();
    let acc = accuracy(&d, |p| fit.predict(p).unwrap().to_string());
    assert!(acc >= 0.93, "{acc}");
}

#[test]
fn ionosphere_poly() {
    let d = common::ionosphere();
    let r = ClassRoles::from_dataset(&d).unwrap();
    let fit = glc_nl_fit(&d, &r, &GlcNlConfig::new(KernelConfig::poly())).unwrap();
    let acc = accuracy(&d, |p| fit.predict(p).unwrap().to_string());
    assert!(acc >= 0.92, "{acc}");
    assert_eq!(fit.expanded.n_attributes(), fit.support_vectors.len());
}
