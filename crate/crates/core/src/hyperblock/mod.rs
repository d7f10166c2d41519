//! Hyperblocks: axis-aligned boxes `b_i ≤ x_i ≤ d_i` read as interval rules.

mod case;
mod induction;
mod selection;

pub use case::{case_rule, case_rule_for_point};
pub use induction::{hbrl, ihyper, ihyper_with_trace, imhyper, mhyper, mhyper_pure, IntervalChoice};
pub use selection::{rule_from_selection, Rect};

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{GlcError, Result};
use crate::linear::GlcModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Algorithm {
    Case,
    Irl,
    Ihyper,
    Mhyper,
    Hbrl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperblock {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub class: String,
    pub seed_attribute: Option<usize>,
    /// Every training point inside the bounds, in index order.
    pub member_indices: Vec<usize>,
    pub algorithm: Algorithm,
}

/// Indices of the points of `d` inside `[lower, upper]` (inclusive).
pub fn covered_indices(lower: &[f64], upper: &[f64], d: &Dataset) -> Vec<usize> {
    d.points()
        .iter()
        .enumerate()
        .filter(|(_, p)| inside(lower, upper, p))
        .map(|(i, _)| i)
        .collect()
}

pub(crate) fn inside(lower: &[f64], upper: &[f64], x: &[f64]) -> bool {
    x.iter()
        .zip(lower.iter().zip(upper))
        .all(|(v, (lo, hi))| lo <= v && v <= hi)
}

/// Elementwise min/max of the points at `indices`.
pub(crate) fn envelope(d: &Dataset, indices: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let n = d.n_attributes();
    let mut lower = vec![f64::INFINITY; n];
    let mut upper = vec![f64::NEG_INFINITY; n];
    for &i in indices {
        for (a, &v) in d.point(i).iter().enumerate() {
            lower[a] = lower[a].min(v);
            upper[a] = upper[a].max(v);
        }
    }
    (lower, upper)
}

impl Hyperblock {
    /// A block with explicit bounds; members are recomputed from `d`.
    pub fn from_bounds(
        lower: Vec<f64>,
        upper: Vec<f64>,
        class: impl Into<String>,
        seed_attribute: Option<usize>,
        algorithm: Algorithm,
        d: &Dataset,
    ) -> Result<Self> {
        let n = d.n_attributes();
        if lower.len() != n || upper.len() != n {
            return Err(GlcError::DimensionMismatch {
                expected: n,
                got: lower.len().min(upper.len()),
            });
        }
        if lower.iter().zip(&upper).any(|(b, u)| !(b <= u)) {
            return Err(GlcError::InvalidParameter(
                "hyperblock lower bound exceeds upper bound".into(),
            ));
        }
        let member_indices = covered_indices(&lower, &upper, d);
        Ok(Hyperblock {
            lower,
            upper,
            class: class.into(),
            seed_attribute,
            member_indices,
            algorithm,
        })
    }

    /// The envelope of the points at `indices` (which must be non-empty).
    pub fn envelope_of(
        d: &Dataset,
        indices: &[usize],
        class: impl Into<String>,
        seed_attribute: Option<usize>,
        algorithm: Algorithm,
    ) -> Self {
        assert!(!indices.is_empty(), "envelope of no points");
        let (lower, upper) = envelope(d, indices);
        let member_indices = covered_indices(&lower, &upper, d);
        Hyperblock {
            lower,
            upper,
            class: class.into(),
            seed_attribute,
            member_indices,
            algorithm,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.lower.len() && inside(&self.lower, &self.upper, x)
    }

    pub fn n_attributes(&self) -> usize {
        self.lower.len()
    }

    /// True when `member_indices` equals the set of points inside the bounds.
    pub fn members_consistent(&self, d: &Dataset) -> bool {
        covered_indices(&self.lower, &self.upper, d) == self.member_indices
    }

    /// Members whose label differs from the block class.
    pub fn misclassified(&self, d: &Dataset) -> usize {
        self.member_indices
            .iter()
            .filter(|&&i| d.label(i) != self.class)
            .count()
    }

    /// The rule as a conjunction of interval tests.
    pub fn rule_text(&self, attributes: &[String]) -> String {
        let terms: Vec<String> = self
            .lower
            .iter()
            .zip(&self.upper)
            .enumerate()
            .map(|(i, (b, u))| {
                let name = attributes.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1));
                format!("{u:.4} >= {name} >= {b:.4}")
            })
            .collect();
        format!("If {} then x is in class {}", terms.join(" & "), self.class)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HbAnalytics {
    /// 1-based position of the block.
    pub block: usize,
    pub total: usize,
    pub class: String,
    pub seed_attribute: Option<usize>,
    pub datapoints: usize,
    pub misclassified: usize,
    pub accuracy: f64,
}

impl HbAnalytics {
    pub fn summary(&self) -> String {
        format!(
            "Block: {}/{} Class: {} Seed Attribute: {} Datapoints: {} ({} misclassified) Accuracy: {:.2}%",
            self.block,
            self.total,
            self.class,
            self.seed_attribute
                .map(|a| (a + 1).to_string())
                .unwrap_or_else(|| "-".into()),
            self.datapoints,
            self.misclassified,
            100.0 * self.accuracy
        )
    }
}

fn analytics_for(b: &Hyperblock, position: usize, total: usize, d: &Dataset) -> HbAnalytics {
    let datapoints = b.member_indices.len();
    let misclassified = b.misclassified(d);
    HbAnalytics {
        block: position + 1,
        total,
        class: b.class.clone(),
        seed_attribute: b.seed_attribute,
        datapoints,
        misclassified,
        accuracy: if datapoints == 0 {
            0.0
        } else {
            (datapoints - misclassified) as f64 / datapoints as f64
        },
    }
}

pub fn hb_analytics(blocks: &[Hyperblock], d: &Dataset) -> Vec<HbAnalytics> {
    blocks
        .iter()
        .enumerate()
        .map(|(i, b)| analytics_for(b, i, blocks.len(), d))
        .collect()
}

/// JSON layout of one rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleExport {
    pub class: String,
    pub bounds: Vec<[f64; 2]>,
    pub seed_attribute: Option<usize>,
    pub algorithm: Algorithm,
    pub analytics: HbAnalytics,
}

pub fn rules_export(blocks: &[Hyperblock], d: &Dataset) -> Vec<RuleExport> {
    blocks
        .iter()
        .zip(hb_analytics(blocks, d))
        .map(|(b, analytics)| RuleExport {
            class: b.class.clone(),
            bounds: b.lower.iter().zip(&b.upper).map(|(&l, &u)| [l, u]).collect(),
            seed_attribute: b.seed_attribute,
            algorithm: b.algorithm,
            analytics,
        })
        .collect()
}

impl RuleExport {
    /// Rebuilds the block against `d`, recomputing its members.
    pub fn to_block(&self, d: &Dataset) -> Result<Hyperblock> {
        Hyperblock::from_bounds(
            self.bounds.iter().map(|b| b[0]).collect(),
            self.bounds.iter().map(|b| b[1]).collect(),
            self.class.clone(),
            self.seed_attribute,
            self.algorithm,
            d,
        )
    }
}

/// Class of the first block containing `x`, or the model's prediction when
/// no block does.
pub fn predict<'a>(blocks: &'a [Hyperblock], m: &'a GlcModel, x: &[f64]) -> Result<&'a str> {
    match blocks.iter().find(|b| b.contains(x)) {
        Some(b) => Ok(&b.class),
        None => m.predict(x),
    }
}
