//! Preprocessing and the JSON documents shared by the CLI and the service.

use serde::{Deserialize, Serialize};

use crate::data::{binarize, normalize_minmax, BinarizationSpec, Dataset};
use crate::error::{GlcError, Result};
use crate::geometry::{build_scene, dsc_scene, DscConfig, Scene, SeparationTransform};
use crate::hyperblock::{case_rule, hbrl, ihyper, imhyper, mhyper, rules_export, Hyperblock, RuleExport};
use crate::kernel::{glc_nl_fit, CoefficientSource, GlcNlConfig, GlcNlFit, KernelConfig, KernelKind, SupportVectorSet};
use crate::linear::{evaluate, fit_glc_lda, ClassRoles, EvaluationReport, GlcModel};
use crate::validation::ClassifierSpec;
use crate::pca::{pca_augment, PcaAugmentation};
use crate::worst_case::{WorstCaseReport, WorstCaseSplit};

pub const DEFAULT_SUPER_CLASS: &str = "combined";

/// Steps applied to a freshly loaded dataset, in this order: one-vs-rest
/// binarization, squared-attribute augmentation, min-max normalization and
/// PCA augmentation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preprocess {
    pub positive_class: Option<String>,
    pub super_class_name: String,
    pub squares: bool,
    pub pca_components: Option<usize>,
}

impl Default for Preprocess {
    fn default() -> Self {
        Preprocess {
            positive_class: None,
            super_class_name: DEFAULT_SUPER_CLASS.into(),
            squares: false,
            pca_components: None,
        }
    }
}

/// Appends `name²` columns holding `x_i²` for every attribute.
pub fn square_augment(d: &Dataset) -> Result<Dataset> {
    let mut attributes = d.attributes().to_vec();
    attributes.extend(d.attributes().iter().map(|a| format!("{a}²")));
    let points = d
        .points()
        .iter()
        .map(|p| p.iter().copied().chain(p.iter().map(|v| v * v)).collect())
        .collect();
    Dataset::new(d.name(), attributes, points, d.labels().to_vec())
}

pub fn prepare(raw: &Dataset, p: &Preprocess) -> Result<Dataset> {
    let mut d = match &p.positive_class {
        Some(c) => binarize(raw, &BinarizationSpec::new(c.clone(), p.super_class_name.clone()))?,
        None => raw.clone(),
    };
    if p.squares {
        d = square_augment(&d)?;
    }
    d = normalize_minmax(&d);
    if let Some(k) = p.pca_components {
        d = pca_augment(&d, &PcaAugmentation::with_components(k))?.0;
    }
    Ok(d)
}

/// Ensures exactly two classes remain.
pub fn require_binary(d: &Dataset) -> Result<()> {
    match d.classes().len() {
        2 => Ok(()),
        1 => Err(GlcError::SingleClass),
        n => Err(GlcError::InvalidParameter(format!(
            "{n} classes found; choose a positive class to combine the rest"
        ))),
    }
}

/// Shape of a dataset without its points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub name: String,
    pub n_points: usize,
    pub n_attributes: usize,
    pub attributes: Vec<String>,
    pub class_counts: std::collections::BTreeMap<String, usize>,
}

impl DatasetSummary {
    pub fn of(d: &Dataset) -> Self {
        DatasetSummary {
            name: d.name().to_string(),
            n_points: d.len(),
            n_attributes: d.n_attributes(),
            attributes: d.attributes().to_vec(),
            class_counts: d.class_counts(),
        }
    }
}

/// A model and how it scores on the data it is drawn with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDocument {
    pub dataset: DatasetSummary,
    pub model: GlcModel,
    pub evaluation: EvaluationReport,
    /// Present for kernel models; `dataset` then describes the expanded space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_vectors: Option<SupportVectorSet>,
}

impl FitDocument {
    pub fn new(d: &Dataset, model: &GlcModel, support_vectors: Option<&SupportVectorSet>) -> Result<Self> {
        Ok(FitDocument {
            dataset: DatasetSummary::of(d),
            model: model.clone(),
            evaluation: evaluate(model, d)?,
            support_vectors: support_vectors.cloned(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RulesDocument {
    /// Upper-case tag, e.g. `IRL` or `IMHYPER`.
    pub algorithm: String,
    pub attributes: Vec<String>,
    pub rules: Vec<RuleExport>,
}

impl RulesDocument {
    pub fn new(algorithm: impl Into<String>, d: &Dataset, blocks: &[Hyperblock]) -> Self {
        RulesDocument {
            algorithm: algorithm.into(),
            attributes: d.attributes().to_vec(),
            rules: rules_export(blocks, d),
        }
    }

    pub fn blocks(&self, d: &Dataset) -> Result<Vec<Hyperblock>> {
        self.rules.iter().map(|r| r.to_block(d)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    #[default]
    Lda,
    GlcNl,
}

impl std::str::FromStr for FitMethod {
    type Err = GlcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "lda" => Ok(FitMethod::Lda),
            "glc_nl" | "nl" => Ok(FitMethod::GlcNl),
            _ => Err(GlcError::InvalidParameter(format!("unknown method {s:?}, expected lda or glc_nl"))),
        }
    }
}

/// How to fit a model. Kernel fields only matter for [`FitMethod::GlcNl`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct FitSpec {
    pub method: FitMethod,
    pub kernel: Option<KernelKind>,
    pub gamma: Option<f64>,
    pub degree: Option<i32>,
    pub seed: u64,
    /// Label to put below the threshold; the first sorted label otherwise.
    pub class1: Option<String>,
    pub coefficients: CoefficientSource,
}

/// A fitted model, with its kernel pipeline when there is one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub model: GlcModel,
    pub nl: Option<GlcNlFit>,
}

impl FittedModel {
    /// The data the model is drawn with: the expanded space for kernels.
    pub fn space<'a>(&'a self, base: &'a Dataset) -> &'a Dataset {
        self.nl.as_ref().map_or(base, |f| &f.expanded)
    }

    pub fn document(&self, base: &Dataset) -> Result<FitDocument> {
        FitDocument::new(
            self.space(base),
            &self.model,
            self.nl.as_ref().map(|f| &f.support_vectors),
        )
    }

    /// Same pipeline with the model replaced, e.g. after a threshold edit.
    pub fn with_model(&self, model: GlcModel) -> Self {
        let mut out = self.clone();
        if let Some(nl) = out.nl.as_mut() {
            nl.model = model.clone();
        }
        out.model = model;
        out
    }
}

pub fn fit(d: &Dataset, spec: &FitSpec) -> Result<FittedModel> {
    require_binary(d)?;
    let roles = match &spec.class1 {
        Some(c) => ClassRoles::with_class1(d, c)?,
        None => ClassRoles::from_dataset(d)?,
    };
    match spec.method {
        FitMethod::Lda => Ok(FittedModel {
            model: fit_glc_lda(d, &roles)?,
            nl: None,
        }),
        FitMethod::GlcNl => {
            let mut kernel = KernelConfig::new(spec.kernel.unwrap_or(KernelKind::Rbf));
            kernel.gamma = spec.gamma;
            if let Some(deg) = spec.degree {
                kernel.degree = deg;
            }
            let mut cfg = GlcNlConfig::new(kernel).with_seed(spec.seed);
            cfg.coefficients = spec.coefficients;
            let nl = glc_nl_fit(d, &roles, &cfg)?;
            Ok(FittedModel {
                model: nl.model.clone(),
                nl: Some(nl),
            })
        }
    }
}

/// Batch rule-induction algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Induction {
    Case,
    Ihyper,
    Mhyper,
    Imhyper,
    Hbrl,
}

impl Induction {
    pub fn tag(self) -> &'static str {
        match self {
            Induction::Case => "CASE",
            Induction::Ihyper => "IHYPER",
            Induction::Mhyper => "MHYPER",
            Induction::Imhyper => "IMHYPER",
            Induction::Hbrl => "HBRL",
        }
    }
}

impl std::str::FromStr for Induction {
    type Err = GlcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "case" => Ok(Induction::Case),
            "ihyper" => Ok(Induction::Ihyper),
            "mhyper" => Ok(Induction::Mhyper),
            "imhyper" => Ok(Induction::Imhyper),
            "hbrl" => Ok(Induction::Hbrl),
            _ => Err(GlcError::InvalidParameter(format!(
                "unknown algorithm {s:?}, expected case, ihyper, mhyper, imhyper or hbrl"
            ))),
        }
    }
}

/// A rule-induction request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub algo: Induction,
    #[serde(default = "one")]
    pub purity: f64,
    #[serde(default)]
    pub impurity: f64,
    /// Training point for [`Algorithm::Case`].
    #[serde(default)]
    pub index: Option<usize>,
}

fn one() -> f64 {
    1.0
}

impl BlockSpec {
    pub fn new(algo: Induction) -> Self {
        BlockSpec {
            algo,
            purity: 1.0,
            impurity: 0.0,
            index: None,
        }
    }
}

pub fn induce(d: &Dataset, m: Option<&GlcModel>, spec: &BlockSpec) -> Result<Vec<Hyperblock>> {
    let need_model = || m.ok_or_else(|| GlcError::InvalidParameter(format!("{:?} needs a fitted model", spec.algo)));
    match spec.algo {
        Induction::Ihyper => ihyper(d, spec.purity),
        Induction::Mhyper => mhyper(d, spec.impurity, None),
        Induction::Imhyper => imhyper(d, spec.purity, spec.impurity),
        Induction::Hbrl => hbrl(d, need_model()?, spec.purity),
        Induction::Case => {
            let i = spec
                .index
                .ok_or_else(|| GlcError::InvalidParameter("CASE needs a point index".into()))?;
            Ok(vec![case_rule(d, need_model()?, i)?])
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseDocument {
    pub split: WorstCaseSplit,
    pub report: WorstCaseReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViewMode {
    Glcl,
    Dsc1,
    Dsc2,
}

impl std::str::FromStr for ViewMode {
    type Err = GlcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "").as_str() {
            "glcl" => Ok(ViewMode::Glcl),
            "dsc1" => Ok(ViewMode::Dsc1),
            "dsc2" => Ok(ViewMode::Dsc2),
            _ => Err(GlcError::InvalidParameter(format!(
                "unknown mode {s:?}, expected glcl, dsc1 or dsc2"
            ))),
        }
    }
}

/// Parses a 1-based attribute order such as `4,2,3,1` into 0-based indices.
pub fn parse_order(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(i) if i >= 1 => Ok(i - 1),
            _ => Err(GlcError::InvalidParameter(format!(
                "bad attribute order {s:?}; use 1-based indices like 4,2,3,1"
            ))),
        })
        .collect()
}

/// The scene for one view. GLC-L views draw the model's space and need a
/// model; DSC views draw `base` in `order` (identity when `None`).
pub fn view_scene(
    base: &Dataset,
    fitted: Option<&FittedModel>,
    mode: ViewMode,
    order: Option<Vec<usize>>,
    bounds: Option<(f64, f64)>,
) -> Result<Scene> {
    let order = order.unwrap_or_else(|| (0..base.n_attributes()).collect());
    match mode {
        ViewMode::Glcl => {
            let f = fitted.ok_or_else(|| GlcError::InvalidParameter("the GLC-L view needs a fitted model".into()))?;
            build_scene(f.space(base), &f.model, bounds)
        }
        ViewMode::Dsc1 => dsc_scene(base, &DscConfig::dsc1(order)?),
        ViewMode::Dsc2 => dsc_scene(base, &DscConfig::dsc2(order)?),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationDocument {
    pub transform: SeparationTransform,
    pub scene: Scene,
}

/// Parses a comma-separated classifier list; `all` means the built-in set.
pub fn parse_models(s: &str) -> Result<Vec<ClassifierSpec>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(ClassifierSpec::builtin());
    }
    s.split(',').map(str::parse).collect()
}

/// Pretty JSON with a trailing newline, the on-disk and on-wire format.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squares_then_normalize() {
        let d = Dataset::new(
            "t",
            vec!["a".into()],
            vec![vec![-1.0], vec![0.0], vec![2.0]],
            vec!["x".into(), "y".into(), "x".into()],
        )
        .unwrap();
        let p = Preprocess {
            squares: true,
            ..Default::default()
        };
        let out = prepare(&d, &p).unwrap();
        assert_eq!(out.attributes(), ["a", "a²"]);
        assert_eq!(out.point(0), &[0.0, 0.25]);
        assert_eq!(out.point(2), &[1.0, 1.0]);
    }

    #[test]
    fn multi_class_needs_binarizing() {
        let d = Dataset::new(
            "t",
            vec!["a".into()],
            vec![vec![0.0], vec![1.0], vec![2.0]],
            vec!["x".into(), "y".into(), "z".into()],
        )
        .unwrap();
        assert!(require_binary(&d).is_err());
        let p = Preprocess {
            positive_class: Some("y".into()),
            ..Default::default()
        };
        assert!(require_binary(&prepare(&d, &p).unwrap()).is_ok());
    }
}
