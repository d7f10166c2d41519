//! GLC-nL: kernel feature expansion around support vectors.
//!
//! Each point `x` becomes `p = (K(x, y_1), …, K(x, y_m))` for the support
//! vectors `y_j`, and an ordinary GLC-L model is fitted on the expanded
//! points.

pub mod smo;

pub use smo::{fit_svm, SvmConfig};

use std::io::Read;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{normalize_minmax, Dataset};
use crate::error::{GlcError, Result};
use crate::linear::{fit_lda, make_glc_model, ClassRoles, GlcModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Poly,
    Rbf,
}

impl std::str::FromStr for KernelKind {
    type Err = GlcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "poly" | "polynomial" => Ok(KernelKind::Poly),
            "rbf" => Ok(KernelKind::Rbf),
            _ => Err(GlcError::InvalidParameter(format!(
                "unknown kernel {s:?}, expected poly or rbf"
            ))),
        }
    }
}

/// `POLY: (γ x·y + coef)^degree`, `RBF: exp(−γ ‖x − y‖²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub kind: KernelKind,
    /// `None` means `1 / n`.
    pub gamma: Option<f64>,
    pub degree: i32,
    pub coef: f64,
}

impl KernelConfig {
    pub fn new(kind: KernelKind) -> Self {
        KernelConfig {
            kind,
            gamma: None,
            degree: 3,
            coef: 1.0,
        }
    }

    pub fn poly() -> Self {
        KernelConfig::new(KernelKind::Poly)
    }

    pub fn rbf() -> Self {
        KernelConfig::new(KernelKind::Rbf)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn gamma_for(&self, n: usize) -> f64 {
        self.gamma.unwrap_or(1.0 / n.max(1) as f64)
    }

    fn validate(&self, n: usize) -> Result<f64> {
        let g = self.gamma_for(n);
        if !(g > 0.0 && g.is_finite()) {
            return Err(GlcError::InvalidParameter(format!("gamma must be positive, got {g}")));
        }
        Ok(g)
    }
}

pub(crate) fn eval_unchecked(kind: KernelKind, gamma: f64, degree: i32, coef: f64, x: &[f64], y: &[f64]) -> f64 {
    match kind {
        KernelKind::Poly => {
            let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
            (gamma * dot + coef).powi(degree)
        }
        KernelKind::Rbf => {
            let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
            (-gamma * d2).exp()
        }
    }
}

/// Kernel value of `x` and `y` with `γ` resolved from their length.
pub fn kernel_eval(x: &[f64], y: &[f64], cfg: &KernelConfig) -> Result<f64> {
    if x.len() != y.len() {
        return Err(GlcError::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let g = cfg.validate(x.len())?;
    Ok(eval_unchecked(cfg.kind, g, cfg.degree, cfg.coef, x, y))
}

/// Support vectors with their multipliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportVectorSet {
    pub vectors: Vec<Vec<f64>>,
    /// `α_j > 0`.
    pub alphas: Vec<f64>,
    /// `+1` for class 2, `−1` for class 1; `0` when unknown.
    pub signs: Vec<f64>,
    pub kernel: KernelConfig,
    /// Resolved `γ`.
    pub gamma: f64,
    pub bias: f64,
    pub converged: bool,
}

impl SupportVectorSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn n_attributes(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    /// Kernel features of one point.
    pub fn features(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_attributes() {
            return Err(GlcError::DimensionMismatch {
                expected: self.n_attributes(),
                got: x.len(),
            });
        }
        let k = &self.kernel;
        Ok(self
            .vectors
            .iter()
            .map(|y| eval_unchecked(k.kind, self.gamma, k.degree, k.coef, x, y))
            .collect())
    }

    /// SVM decision value `Σ α_j s_j K(x, y_j) + b`; positive means class 2.
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        Ok(self
            .features(x)?
            .iter()
            .zip(self.alphas.iter().zip(&self.signs))
            .map(|(f, (a, s))| f * a * s)
            .sum::<f64>()
            + self.bias)
    }
}

/// Reads a support-vector CSV: a header, `n` attribute columns and an
/// `alpha` column. A negative alpha is read as `α y` with `y = −1`.
pub fn load_support_vectors<R: Read>(source: R, kernel: KernelConfig) -> Result<SupportVectorSet> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);
    let header = rdr
        .headers()
        .map_err(|e| GlcError::Csv {
            row: 1,
            column: 0,
            message: e.to_string(),
        })?
        .clone();
    let alpha_col = header
        .iter()
        .position(|h| h.eq_ignore_ascii_case("alpha"))
        .ok_or_else(|| GlcError::LabelColumnNotFound("alpha".into()))?;
    let mut vectors = Vec::new();
    let mut alphas = Vec::new();
    let mut signs = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let row = r + 2;
        let rec = rec.map_err(|e| GlcError::Csv {
            row,
            column: 0,
            message: e.to_string(),
        })?;
        let mut v = Vec::with_capacity(rec.len().saturating_sub(1));
        let mut alpha = 0.0;
        for (c, cell) in rec.iter().enumerate() {
            let x: f64 = cell.parse().map_err(|_| GlcError::NonNumeric {
                row,
                column: c + 1,
                attribute: header.get(c).unwrap_or("").to_string(),
                value: cell.to_string(),
            })?;
            if !x.is_finite() {
                return Err(GlcError::NonFinite { row, column: c + 1 });
            }
            if c == alpha_col {
                alpha = x;
            } else {
                v.push(x);
            }
        }
        if alpha.abs() <= 1e-8 {
            continue;
        }
        vectors.push(v);
        alphas.push(alpha.abs());
        signs.push(alpha.signum());
    }
    if vectors.is_empty() {
        return Err(GlcError::EmptySupportVectors);
    }
    let gamma = kernel.validate(vectors[0].len())?;
    Ok(SupportVectorSet {
        vectors,
        alphas,
        signs,
        kernel,
        gamma,
        bias: 0.0,
        converged: true,
    })
}

/// Replaces every point of `d` by its kernel features, `sv1 … svm`.
pub fn expand_dataset(d: &Dataset, svs: &SupportVectorSet) -> Result<Dataset> {
    if svs.is_empty() {
        return Err(GlcError::EmptySupportVectors);
    }
    if svs.n_attributes() != d.n_attributes() {
        return Err(GlcError::DimensionMismatch {
            expected: d.n_attributes(),
            got: svs.n_attributes(),
        });
    }
    let points = d
        .points()
        .par_iter()
        .map(|x| svs.features(x))
        .collect::<Result<Vec<_>>>()?;
    let kind = match svs.kernel.kind {
        KernelKind::Poly => "poly",
        KernelKind::Rbf => "rbf",
    };
    Dataset::new(
        format!("{}+{kind}", d.name()),
        (1..=svs.len()).map(|j| format!("sv{j}")).collect(),
        points,
        d.labels().to_vec(),
    )
}

/// Where the expanded-space coefficients come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientSource {
    /// Refit LDA on the expanded features.
    #[default]
    Lda,
    /// Use `α_j s_j` of the support vectors.
    DualCoefficients,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlcNlConfig {
    pub svm: SvmConfig,
    pub coefficients: CoefficientSource,
}

impl GlcNlConfig {
    pub fn new(kernel: KernelConfig) -> Self {
        GlcNlConfig {
            svm: SvmConfig::new(kernel),
            coefficients: CoefficientSource::Lda,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.svm.seed = seed;
        self
    }
}

/// A fitted GLC-nL pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlcNlFit {
    pub support_vectors: SupportVectorSet,
    /// Expanded and min-max normalized training set.
    pub expanded: Dataset,
    pub model: GlcModel,
}

impl GlcNlFit {
    /// Expanded, normalized features of a point in the base space.
    pub fn expand_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.expanded.normalize_point(&self.support_vectors.features(x)?)
    }

    pub fn project(&self, x: &[f64]) -> Result<f64> {
        self.model.project(&self.expand_point(x)?)
    }

    pub fn predict(&self, x: &[f64]) -> Result<&str> {
        let p = self.expand_point(x)?;
        self.model.predict(&p)
    }
}

/// SVM, expansion, normalization and a GLC-L model in the expanded space.
pub fn glc_nl_fit(d: &Dataset, roles: &ClassRoles, cfg: &GlcNlConfig) -> Result<GlcNlFit> {
    let svs = fit_svm(d, roles, &cfg.svm)?;
    glc_nl_from_support_vectors(d, roles, svs, cfg.coefficients)
}

/// The expansion half of [`glc_nl_fit`] for given support vectors.
pub fn glc_nl_from_support_vectors(
    d: &Dataset,
    roles: &ClassRoles,
    svs: SupportVectorSet,
    source: CoefficientSource,
) -> Result<GlcNlFit> {
    let expanded = normalize_minmax(&expand_dataset(d, &svs)?);
    let coefficients = match source {
        CoefficientSource::Lda => fit_lda(&expanded, roles)?,
        CoefficientSource::DualCoefficients => {
            let ranges = expanded.norm_params().expect("normalized");
            svs.alphas
                .iter()
                .zip(&svs.signs)
                .zip(ranges)
                .map(|((a, s), (lo, hi))| a * s * (hi - lo))
                .collect()
        }
    };
    let model = make_glc_model(coefficients, &expanded, roles)?;
    Ok(GlcNlFit {
        support_vectors: svs,
        expanded,
        model,
    })
}
