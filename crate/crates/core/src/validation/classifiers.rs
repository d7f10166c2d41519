//! Built-in baseline classifiers.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{GlcError, Result};
use crate::kernel::{glc_nl_fit, GlcNlConfig, GlcNlFit, KernelConfig, KernelKind};
use crate::linear::{fit_glc_lda, ClassRoles, GlcModel};

pub const NB_VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ClassifierSpec {
    /// LDA direction with the accuracy-maximizing threshold.
    Lda,
    /// k nearest neighbours under Euclidean distance.
    Knn { k: usize },
    GaussianNb,
    GlcNl { kernel: KernelKind },
}

impl ClassifierSpec {
    pub fn builtin() -> Vec<ClassifierSpec> {
        vec![
            ClassifierSpec::Lda,
            ClassifierSpec::Knn { k: 5 },
            ClassifierSpec::GaussianNb,
        ]
    }
}

impl fmt::Display for ClassifierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifierSpec::Lda => write!(f, "LDA"),
            ClassifierSpec::Knn { k } => write!(f, "KNN(k={k})"),
            ClassifierSpec::GaussianNb => write!(f, "GaussianNB"),
            ClassifierSpec::GlcNl { kernel: KernelKind::Poly } => write!(f, "GLC-nL(poly)"),
            ClassifierSpec::GlcNl { kernel: KernelKind::Rbf } => write!(f, "GLC-nL(rbf)"),
        }
    }
}

impl std::str::FromStr for ClassifierSpec {
    type Err = GlcError;

    /// Accepts `lda`, `knn`, `knn:K`, `gnb` / `nb`, `glcnl:poly`, `glcnl:rbf`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let (name, arg) = match lower.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (lower.as_str(), None),
        };
        match (name, arg) {
            ("lda", None) => Ok(ClassifierSpec::Lda),
            ("knn", None) => Ok(ClassifierSpec::Knn { k: 5 }),
            ("knn", Some(k)) => match k.parse() {
                Ok(k) if k > 0 => Ok(ClassifierSpec::Knn { k }),
                _ => Err(GlcError::InvalidParameter(format!("bad KNN k in {s:?}"))),
            },
            ("gnb" | "nb" | "gaussian_nb" | "gaussiannb", None) => Ok(ClassifierSpec::GaussianNb),
            ("glcnl" | "glc_nl" | "glc-nl", Some(k)) => Ok(ClassifierSpec::GlcNl { kernel: k.parse()? }),
            ("glcnl" | "glc_nl" | "glc-nl", None) => Ok(ClassifierSpec::GlcNl {
                kernel: KernelKind::Rbf,
            }),
            _ => Err(GlcError::InvalidParameter(format!(
                "unknown classifier {s:?}; expected lda, knn[:k], gnb or glcnl[:poly|rbf]"
            ))),
        }
    }
}

/// Per-class Gaussian likelihoods with a class prior.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianNb {
    classes: Vec<String>,
    log_priors: Vec<f64>,
    means: Vec<Vec<f64>>,
    variances: Vec<Vec<f64>>,
}

impl GaussianNb {
    pub fn fit(d: &Dataset) -> Result<Self> {
        let (classes, ids) = d.class_ids();
        let n = d.n_attributes();
        let mut counts = vec![0usize; classes.len()];
        let mut means = vec![vec![0.0; n]; classes.len()];
        for (p, &c) in d.points().iter().zip(&ids) {
            counts[c] += 1;
            for (m, v) in means[c].iter_mut().zip(p) {
                *m += v;
            }
        }
        for (m, &cnt) in means.iter_mut().zip(&counts) {
            m.iter_mut().for_each(|v| *v /= cnt as f64);
        }
        let mut variances = vec![vec![0.0; n]; classes.len()];
        for (p, &c) in d.points().iter().zip(&ids) {
            for a in 0..n {
                let dv = p[a] - means[c][a];
                variances[c][a] += dv * dv;
            }
        }
        for (v, &cnt) in variances.iter_mut().zip(&counts) {
            v.iter_mut()
                .for_each(|x| *x = (*x / cnt as f64).max(NB_VARIANCE_FLOOR));
        }
        let total = d.len() as f64;
        Ok(GaussianNb {
            log_priors: counts.iter().map(|&c| (c as f64 / total).ln()).collect(),
            classes,
            means,
            variances,
        })
    }

    /// Unnormalized log posteriors, one per class in sorted label order.
    pub fn log_posteriors(&self, x: &[f64]) -> Vec<f64> {
        (0..self.classes.len())
            .map(|c| {
                self.log_priors[c]
                    + x.iter()
                        .zip(self.means[c].iter().zip(&self.variances[c]))
                        .map(|(v, (m, var))| {
                            -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + (v - m) * (v - m) / var)
                        })
                        .sum::<f64>()
            })
            .collect()
    }

    pub fn predict(&self, x: &[f64]) -> &str {
        let lp = self.log_posteriors(x);
        let mut best = 0;
        for (c, &v) in lp.iter().enumerate() {
            if v > lp[best] {
                best = c;
            }
        }
        &self.classes[best]
    }
}

/// `k` nearest training points by Euclidean distance, ties in distance going
/// to the lower training index. The vote is by count; among tied classes the
/// one holding the nearest neighbour wins.
pub fn knn_predict<'a>(train: &'a Dataset, k: usize, x: &[f64]) -> &'a str {
    let mut dist: Vec<(f64, usize)> = train
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| (p.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum(), i))
        .collect();
    dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let neighbours = &dist[..k.min(dist.len())];
    // (label, votes, rank of its nearest member)
    let mut tally: Vec<(&str, usize, usize)> = Vec::new();
    for (rank, &(_, i)) in neighbours.iter().enumerate() {
        let label = train.label(i);
        match tally.iter_mut().find(|t| t.0 == label) {
            Some(t) => t.1 += 1,
            None => tally.push((label, 1, rank)),
        }
    }
    tally
        .iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.2.cmp(&a.2)))
        .map(|t| t.0)
        .expect("non-empty training set")
}

/// A classifier fitted on one training set.
#[derive(Debug, Clone)]
pub enum Trained {
    Lda(GlcModel),
    Knn { k: usize, train: Dataset },
    GaussianNb(GaussianNb),
    GlcNl(Box<GlcNlFit>),
}

impl Trained {
    pub fn predict(&self, x: &[f64]) -> Result<String> {
        Ok(match self {
            Trained::Lda(m) => m.predict(x)?.to_string(),
            Trained::Knn { k, train } => {
                if x.len() != train.n_attributes() {
                    return Err(GlcError::DimensionMismatch {
                        expected: train.n_attributes(),
                        got: x.len(),
                    });
                }
                knn_predict(train, *k, x).to_string()
            }
            Trained::GaussianNb(nb) => nb.predict(x).to_string(),
            Trained::GlcNl(fit) => fit.predict(x)?.to_string(),
        })
    }

    /// Fraction of `d` predicted correctly.
    pub fn accuracy(&self, d: &Dataset) -> Result<f64> {
        let mut correct = 0usize;
        for (p, l) in d.points().iter().zip(d.labels()) {
            if self.predict(p)? == *l {
                correct += 1;
            }
        }
        Ok(correct as f64 / d.len() as f64)
    }
}

/// Fits `spec` on `train`. `roles` fixes which label plays class 1 for the
/// discriminant-based models (sorted label order when `None`); `seed` drives
/// the SVM of GLC-nL.
pub fn train(
    spec: &ClassifierSpec,
    train: &Dataset,
    roles: Option<&ClassRoles>,
    seed: u64,
) -> Result<Trained> {
    if train.is_empty() {
        return Err(GlcError::EmptyDataset);
    }
    let roles = || match roles {
        Some(r) => Ok(r.clone()),
        None => ClassRoles::from_dataset(train),
    };
    Ok(match *spec {
        ClassifierSpec::Lda => Trained::Lda(fit_glc_lda(train, &roles()?)?),
        ClassifierSpec::Knn { k } => {
            if k == 0 {
                return Err(GlcError::InvalidParameter("KNN needs k ≥ 1".into()));
            }
            Trained::Knn {
                k,
                train: train.clone(),
            }
        }
        ClassifierSpec::GaussianNb => Trained::GaussianNb(GaussianNb::fit(train)?),
        ClassifierSpec::GlcNl { kernel } => {
            let cfg = GlcNlConfig::new(KernelConfig::new(kernel)).with_seed(seed);
            Trained::GlcNl(Box::new(glc_nl_fit(train, &roles()?, &cfg)?))
        }
    })
}

/// One-shot prediction: fit on `train_set`, classify `x`.
pub fn baseline_predict(spec: &ClassifierSpec, train_set: &Dataset, x: &[f64]) -> Result<String> {
    train(spec, train_set, None, 0)?.predict(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(points: Vec<Vec<f64>>, labels: &[&str]) -> Dataset {
        let n = points[0].len();
        Dataset::new(
            "t",
            (0..n).map(|i| format!("x{i}")).collect(),
            points,
            labels.iter().map(|s| s.to_string()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn parse_specs() {
        assert_eq!("lda".parse::<ClassifierSpec>().unwrap(), ClassifierSpec::Lda);
        assert_eq!("KNN:3".parse::<ClassifierSpec>().unwrap(), ClassifierSpec::Knn { k: 3 });
        assert_eq!("gnb".parse::<ClassifierSpec>().unwrap(), ClassifierSpec::GaussianNb);
        assert_eq!(
            "glcnl:poly".parse::<ClassifierSpec>().unwrap(),
            ClassifierSpec::GlcNl { kernel: KernelKind::Poly }
        );
        assert!("svm".parse::<ClassifierSpec>().is_err());
        assert!("knn:0".parse::<ClassifierSpec>().is_err());
        assert_eq!(ClassifierSpec::Knn { k: 5 }.to_string(), "KNN(k=5)");
    }

    #[test]
    fn knn_exact_match() {
        let d = ds(vec![vec![0.0], vec![0.5], vec![1.0]], &["a", "b", "a"]);
        let spec = ClassifierSpec::Knn { k: 1 };
        assert_eq!(baseline_predict(&spec, &d, &[0.5]).unwrap(), "b");
    }

    #[test]
    fn knn_distance_tie_goes_to_lower_index() {
        let d = ds(vec![vec![0.0], vec![1.0]], &["b", "a"]);
        assert_eq!(knn_predict(&d, 1, &[0.5]), "b");
        // vote tie between a and b: the nearest neighbour decides
        let d = ds(vec![vec![0.0], vec![0.9]], &["a", "b"]);
        assert_eq!(knn_predict(&d, 2, &[0.6]), "b");
    }

    #[test]
    fn naive_bayes_symmetric_boundary() {
        let pts: Vec<Vec<f64>> = [-1.3, -1.0, -0.7, 0.7, 1.0, 1.3].iter().map(|&v| vec![v]).collect();
        let d = ds(pts, &["a", "a", "a", "b", "b", "b"]);
        let nb = GaussianNb::fit(&d).unwrap();
        let lp = nb.log_posteriors(&[0.0]);
        assert!((lp[0] - lp[1]).abs() < 1e-9);
        assert_eq!(nb.predict(&[-1e-6]), "a");
        assert_eq!(nb.predict(&[1e-6]), "b");
    }

    #[test]
    fn naive_bayes_variance_floor() {
        let d = ds(vec![vec![1.0], vec![1.0], vec![2.0], vec![2.0]], &["a", "a", "b", "b"]);
        let nb = GaussianNb::fit(&d).unwrap();
        assert_eq!(nb.predict(&[1.1]), "a");
        assert!(nb.log_posteriors(&[1.5]).iter().all(|v| v.is_finite()));
    }

    #[test]
    fn lda_on_separable_toy() {
        let d = ds(vec![vec![0.1], vec![0.2], vec![0.8], vec![0.9]], &["a", "a", "b", "b"]);
        let t = train(&ClassifierSpec::Lda, &d, Some(&ClassRoles::new("a", "b")), 0).unwrap();
        assert_eq!(t.accuracy(&d).unwrap(), 1.0);
    }
}
