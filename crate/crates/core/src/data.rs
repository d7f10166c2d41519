//! Datasets: loading, min-max normalization and class binarization.

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{GlcError, Result};

/// Labeled n-D points.
///
/// Rows all have `attributes.len()` finite values. When `norm_params` is
/// present the values were produced by [`normalize_minmax`] and lie in
/// `[0, 1]`; the stored `(min, max)` pairs map them back to raw units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DatasetRepr")]
pub struct Dataset {
    name: String,
    attributes: Vec<String>,
    points: Vec<Vec<f64>>,
    labels: Vec<String>,
    norm_params: Option<Vec<(f64, f64)>>,
}

#[derive(Deserialize)]
struct DatasetRepr {
    name: String,
    attributes: Vec<String>,
    points: Vec<Vec<f64>>,
    labels: Vec<String>,
    #[serde(default)]
    norm_params: Option<Vec<(f64, f64)>>,
}

impl TryFrom<DatasetRepr> for Dataset {
    type Error = GlcError;

    fn try_from(r: DatasetRepr) -> Result<Self> {
        let mut d = Dataset::new(r.name, r.attributes, r.points, r.labels)?;
        if let Some(params) = r.norm_params {
            if params.len() != d.n_attributes() {
                return Err(GlcError::DimensionMismatch {
                    expected: d.n_attributes(),
                    got: params.len(),
                });
            }
            d.norm_params = Some(params);
        }
        Ok(d)
    }
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        attributes: Vec<String>,
        points: Vec<Vec<f64>>,
        labels: Vec<String>,
    ) -> Result<Self> {
        if attributes.is_empty() {
            return Err(GlcError::NoAttributes);
        }
        if points.is_empty() {
            return Err(GlcError::EmptyDataset);
        }
        if points.len() != labels.len() {
            return Err(GlcError::DimensionMismatch {
                expected: points.len(),
                got: labels.len(),
            });
        }
        for (row, p) in points.iter().enumerate() {
            if p.len() != attributes.len() {
                return Err(GlcError::DimensionMismatch {
                    expected: attributes.len(),
                    got: p.len(),
                });
            }
            if let Some(column) = p.iter().position(|v| !v.is_finite()) {
                return Err(GlcError::NonFinite { row, column });
            }
        }
        Ok(Dataset {
            name: name.into(),
            attributes,
            points,
            labels,
            norm_params: None,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn norm_params(&self) -> Option<&[(f64, f64)]> {
        self.norm_params.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    /// Distinct labels in lexicographic order.
    pub fn classes(&self) -> Vec<String> {
        let mut c: Vec<String> = self.labels.clone();
        c.sort();
        c.dedup();
        c
    }

    pub fn class_counts(&self) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for l in &self.labels {
            *m.entry(l.clone()).or_insert(0) += 1;
        }
        m
    }

    /// Class index of every point, against [`Dataset::classes`].
    pub fn class_ids(&self) -> (Vec<String>, Vec<usize>) {
        let classes = self.classes();
        let ids = self
            .labels
            .iter()
            .map(|l| classes.binary_search(l).expect("label is a class"))
            .collect();
        (classes, ids)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Rows at `indices`, in that order. Normalization parameters carry over.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let mut d = Dataset::new(
            self.name.clone(),
            self.attributes.clone(),
            indices.iter().map(|&i| self.points[i].clone()).collect(),
            indices.iter().map(|&i| self.labels[i].clone()).collect(),
        )?;
        d.norm_params = self.norm_params.clone();
        Ok(d)
    }

    /// Same points with new labels.
    pub fn relabeled(&self, labels: Vec<String>) -> Result<Dataset> {
        if labels.len() != self.len() {
            return Err(GlcError::DimensionMismatch {
                expected: self.len(),
                got: labels.len(),
            });
        }
        Ok(Dataset {
            labels,
            ..self.clone()
        })
    }

    /// Applies the stored normalization to a raw point. Values outside the
    /// training range map outside `[0, 1]`.
    pub fn normalize_point(&self, raw: &[f64]) -> Result<Vec<f64>> {
        if raw.len() != self.n_attributes() {
            return Err(GlcError::DimensionMismatch {
                expected: self.n_attributes(),
                got: raw.len(),
            });
        }
        Ok(match &self.norm_params {
            Some(p) => raw
                .iter()
                .zip(p)
                .map(|(&v, &(lo, hi))| scale_value(v, lo, hi))
                .collect(),
            None => raw.to_vec(),
        })
    }

    /// Maps a normalized point back to raw units.
    pub fn denormalize_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_attributes() {
            return Err(GlcError::DimensionMismatch {
                expected: self.n_attributes(),
                got: x.len(),
            });
        }
        Ok(match &self.norm_params {
            Some(p) => x
                .iter()
                .zip(p)
                .map(|(&v, &(lo, hi))| lo + v * (hi - lo))
                .collect(),
            None => x.to_vec(),
        })
    }
}

fn scale_value(v: f64, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        (v - lo) / (hi - lo)
    } else {
        0.0
    }
}

/// Which CSV column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

impl LabelColumn {
    /// Parses a `--label-col` value. Header names take precedence over
    /// indices when the data is read, so a column literally named `"3"`
    /// still resolves by name.
    pub fn parse(s: &str) -> LabelColumn {
        match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        }
    }

    fn resolve(&self, headers: &[String]) -> Result<usize> {
        match self {
            LabelColumn::Name(n) => headers
                .iter()
                .position(|h| h == n)
                .ok_or_else(|| GlcError::LabelColumnNotFound(n.clone())),
            LabelColumn::Index(i) => {
                let as_name = i.to_string();
                if let Some(p) = headers.iter().position(|h| *h == as_name) {
                    Ok(p)
                } else if *i < headers.len() {
                    Ok(*i)
                } else {
                    Err(GlcError::LabelColumnNotFound(as_name))
                }
            }
        }
    }
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(LabelColumn::parse(s))
    }
}

/// Reads a comma-separated file with a mandatory header row.
///
/// Every column except the label column must parse as a finite real. Labels
/// are kept verbatim.
pub fn load_csv<R: Read>(source: R, label_column: &LabelColumn) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(&e, 0))?
        .iter()
        .map(str::to_string)
        .collect();
    let label_idx = label_column.resolve(&headers)?;
    let attributes: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (r, rec) in reader.records().enumerate() {
        // header is row 0, data rows are 1-based
        let row = r + 1;
        let rec = rec.map_err(|e| csv_error(&e, row))?;
        if rec.len() != headers.len() {
            return Err(GlcError::Csv {
                row,
                column: rec.len(),
                message: format!("expected {} fields, found {}", headers.len(), rec.len()),
            });
        }
        let mut p = Vec::with_capacity(attributes.len());
        for (column, field) in rec.iter().enumerate() {
            if column == label_idx {
                labels.push(field.to_string());
                continue;
            }
            let v: f64 = field.parse().map_err(|_| GlcError::NonNumeric {
                row,
                column,
                attribute: headers[column].clone(),
                value: field.to_string(),
            })?;
            if !v.is_finite() {
                return Err(GlcError::NonFinite { row, column });
            }
            p.push(v);
        }
        points.push(p);
    }
    Dataset::new("dataset", attributes, points, labels)
}

fn csv_error(e: &csv::Error, row: usize) -> GlcError {
    let (row, column) = match e.position() {
        Some(p) => (p.record() as usize, 0),
        None => (row, 0),
    };
    GlcError::Csv {
        row,
        column,
        message: e.to_string(),
    }
}

/// Min-max scales every attribute to `[0, 1]`; constant attributes map to 0.
///
/// Applying it to an already-normalized dataset is the identity, and the
/// recorded parameters keep pointing at the original raw units.
pub fn normalize_minmax(d: &Dataset) -> Dataset {
    let n = d.n_attributes();
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); n];
    for p in &d.points {
        for (r, &v) in ranges.iter_mut().zip(p) {
            r.0 = r.0.min(v);
            r.1 = r.1.max(v);
        }
    }
    let points = d
        .points
        .iter()
        .map(|p| {
            p.iter()
                .zip(&ranges)
                .map(|(&v, &(lo, hi))| scale_value(v, lo, hi))
                .collect()
        })
        .collect();
    let params = match &d.norm_params {
        None => ranges,
        Some(prev) => prev
            .iter()
            .zip(&ranges)
            .map(|(&(plo, phi), &(lo, hi))| {
                let span = phi - plo;
                if (lo, hi) == (0.0, 1.0) {
                    (plo, phi)
                } else if hi > lo {
                    (plo + span * lo, plo + span * hi)
                } else {
                    (plo + span * lo, plo + span * lo)
                }
            })
            .collect(),
    };
    Dataset {
        name: d.name.clone(),
        attributes: d.attributes.clone(),
        points,
        labels: d.labels.clone(),
        norm_params: Some(params),
    }
}

/// One-vs-rest reduction: every class other than `positive_class` is folded
/// into `super_class_name`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinarizationSpec {
    pub positive_class: String,
    pub super_class_name: String,
}

impl BinarizationSpec {
    pub fn new(positive_class: impl Into<String>, super_class_name: impl Into<String>) -> Self {
        BinarizationSpec {
            positive_class: positive_class.into(),
            super_class_name: super_class_name.into(),
        }
    }
}

pub fn binarize(d: &Dataset, spec: &BinarizationSpec) -> Result<Dataset> {
    if !d.labels.contains(&spec.positive_class) {
        return Err(GlcError::UnknownClass(spec.positive_class.clone()));
    }
    if spec.super_class_name == spec.positive_class {
        return Err(GlcError::InvalidParameter(
            "super class name must differ from the positive class".into(),
        ));
    }
    let labels = d
        .labels
        .iter()
        .map(|l| {
            if *l == spec.positive_class {
                l.clone()
            } else {
                spec.super_class_name.clone()
            }
        })
        .collect();
    d.relabeled(labels)
}

/// Serializes a dataset to the JSON export layout.
pub fn to_json(d: &Dataset) -> Result<String> {
    Ok(serde_json::to_string_pretty(d)?)
}
