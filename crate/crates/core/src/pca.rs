//! Principal-component attribute augmentation.
//!
//! The leading principal components of a normalized dataset are prepended as
//! new attributes. The component columns are min-max scaled and multiplied by
//! `component_scale` (1.5 by default) while the original columns are
//! multiplied by `other_scale` (0.05), so that in a scaffold view the
//! component attributes dominate the picture.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{GlcError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaAugmentation {
    pub n_components: usize,
    pub component_scale: f64,
    pub other_scale: f64,
    /// Unit-length principal directions, one row per component, in
    /// non-increasing eigenvalue order. Empty until fitted.
    #[serde(default)]
    pub components: Vec<Vec<f64>>,
    #[serde(default)]
    pub eigenvalues: Vec<f64>,
    #[serde(default)]
    pub means: Vec<f64>,
}

impl Default for PcaAugmentation {
    fn default() -> Self {
        PcaAugmentation {
            n_components: 2,
            component_scale: 1.5,
            other_scale: 0.05,
            components: Vec::new(),
            eigenvalues: Vec::new(),
            means: Vec::new(),
        }
    }
}

impl PcaAugmentation {
    pub fn with_components(n_components: usize) -> Self {
        PcaAugmentation {
            n_components,
            ..Default::default()
        }
    }

    /// Raw (unscaled) component scores of `x` under the fitted directions.
    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| {
                c.iter()
                    .zip(x.iter().zip(&self.means))
                    .map(|(ci, (xi, mi))| ci * (xi - mi))
                    .sum()
            })
            .collect()
    }
}

/// Eigen-decomposes the sample covariance of `d`. Returns all directions,
/// sorted by non-increasing eigenvalue, each with its first non-negligible
/// coordinate made positive.
pub fn principal_components(d: &Dataset) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    let n = d.n_attributes();
    let rows = d.len();
    let mut means = vec![0.0; n];
    for p in d.points() {
        for (m, v) in means.iter_mut().zip(p) {
            *m += v;
        }
    }
    means.iter_mut().for_each(|m| *m /= rows as f64);

    let denom = if rows > 1 { (rows - 1) as f64 } else { 1.0 };
    let mut cov = DMatrix::<f64>::zeros(n, n);
    for p in d.points() {
        for i in 0..n {
            let di = p[i] - means[i];
            for j in i..n {
                cov[(i, j)] += di * (p[j] - means[j]);
            }
        }
    }
    for i in 0..n {
        for j in i..n {
            let v = cov[(i, j)] / denom;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut components = Vec::with_capacity(n);
    for &k in &order {
        let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        if let Some(first) = v.iter().find(|c| c.abs() > 1e-12) {
            if *first < 0.0 {
                v.iter_mut().for_each(|c| *c = -*c);
            }
        }
        eigenvalues.push(eig.eigenvalues[k]);
        components.push(v);
    }
    (means, components, eigenvalues)
}

/// Prepends `cfg.n_components` principal-component attributes (`pc1`, `pc2`,
/// ...) to a normalized dataset. Returns the augmented dataset and the fitted
/// configuration.
pub fn pca_augment(d: &Dataset, cfg: &PcaAugmentation) -> Result<(Dataset, PcaAugmentation)> {
    let n = d.n_attributes();
    if cfg.n_components == 0 || cfg.n_components > n {
        return Err(GlcError::InvalidParameter(format!(
            "n_components must be in 1..={n}, got {}",
            cfg.n_components
        )));
    }
    let (means, mut components, mut eigenvalues) = principal_components(d);
    components.truncate(cfg.n_components);
    eigenvalues.truncate(cfg.n_components);
    let fitted = PcaAugmentation {
        components,
        eigenvalues,
        means,
        ..cfg.clone()
    };

    let scores: Vec<Vec<f64>> = d.points().iter().map(|p| fitted.scores(p)).collect();
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); cfg.n_components];
    for s in &scores {
        for (r, &v) in ranges.iter_mut().zip(s) {
            r.0 = r.0.min(v);
            r.1 = r.1.max(v);
        }
    }

    let points = d
        .points()
        .iter()
        .zip(&scores)
        .map(|(p, s)| {
            let mut row: Vec<f64> = s
                .iter()
                .zip(&ranges)
                .map(|(&v, &(lo, hi))| {
                    let unit = if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
                    unit * cfg.component_scale
                })
                .collect();
            row.extend(p.iter().map(|v| v * cfg.other_scale));
            row
        })
        .collect();

    let mut attributes: Vec<String> = (1..=cfg.n_components).map(|i| format!("pc{i}")).collect();
    attributes.extend(d.attributes().iter().cloned());
    let out = Dataset::new(
        format!("{}+pca", d.name()),
        attributes,
        points,
        d.labels().to_vec(),
    )?;
    Ok((out, fitted))
}
