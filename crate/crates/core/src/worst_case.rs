//! Worst-case validation splits: the band of projections where the classes
//! overlap, and the four-way report on it.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{GlcError, Result};
use crate::linear::{evaluate, fit_glc_lda, EvaluationReport, GlcModel};

pub const DEFAULT_CAP: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseSplit {
    pub lower: f64,
    pub upper: f64,
    #[serde(rename = "indices")]
    pub member_indices: Vec<usize>,
    pub capped: bool,
    pub cap_fraction: f64,
}

impl WorstCaseSplit {
    pub fn is_empty(&self) -> bool {
        self.member_indices.is_empty()
    }

    /// Indices of `0..n` not in the split.
    pub fn complement(&self, n: usize) -> Vec<usize> {
        let mut member = vec![false; n];
        for &i in &self.member_indices {
            member[i] = true;
        }
        (0..n).filter(|&i| !member[i]).collect()
    }
}

/// The smallest projection interval holding every misclassified point.
///
/// With no misclassified point both bounds sit at the threshold and the split
/// is empty. If the interval is wider than `cap_fraction` of the projection
/// range, misclassified projections are dropped one at a time, always the one
/// farther from the threshold (the lower one on a tie), until it fits.
/// Members are all points projecting into `[lower, upper]`.
pub fn wcl_split(d: &Dataset, m: &GlcModel, cap_fraction: f64) -> Result<WorstCaseSplit> {
    if !(cap_fraction > 0.0 && cap_fraction <= 1.0) {
        return Err(GlcError::InvalidParameter(format!(
            "cap fraction must be in (0, 1], got {cap_fraction}"
        )));
    }
    let report = evaluate(m, d)?;
    let u = &report.projections;
    let t = m.threshold();
    let mut wrong: Vec<f64> = report.misclassified_indices.iter().map(|&i| u[i]).collect();
    if wrong.is_empty() {
        return Ok(WorstCaseSplit {
            lower: t,
            upper: t,
            member_indices: Vec::new(),
            capped: false,
            cap_fraction,
        });
    }
    wrong.sort_by(f64::total_cmp);
    let (umin, umax) = u
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let limit = cap_fraction * (umax - umin);
    let (mut lo, mut hi) = (0usize, wrong.len() - 1);
    let mut capped = false;
    while wrong[hi] - wrong[lo] > limit && lo < hi {
        capped = true;
        if t - wrong[lo] >= wrong[hi] - t {
            lo += 1;
        } else {
            hi -= 1;
        }
    }
    let (lower, upper) = (wrong[lo], wrong[hi]);
    let member_indices = (0..u.len()).filter(|&i| lower <= u[i] && u[i] <= upper).collect();
    Ok(WorstCaseSplit {
        lower,
        upper,
        member_indices,
        capped,
        cap_fraction,
    })
}

/// A split from an explicit selection, e.g. a brush in a DSC2 view. The
/// bounds are the extreme projections of the selected points and the
/// members are exactly the selection.
pub fn manual_split(d: &Dataset, m: &GlcModel, indices: &[usize]) -> Result<WorstCaseSplit> {
    let mut members = indices.to_vec();
    members.sort_unstable();
    members.dedup();
    if members.is_empty() {
        return Err(GlcError::EmptySplit);
    }
    if let Some(&bad) = members.iter().find(|&&i| i >= d.len()) {
        return Err(GlcError::PointNotFound(format!("index {bad}")));
    }
    let u = members
        .iter()
        .map(|&i| m.project(d.point(i)))
        .collect::<Result<Vec<_>>>()?;
    let (lower, upper) = u
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    Ok(WorstCaseSplit {
        lower,
        upper,
        member_indices: members,
        capped: false,
        cap_fraction: 1.0,
    })
}

/// One cell of the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubReport {
    pub confusion: Option<[[usize; 2]; 2]>,
    pub accuracy: Option<f64>,
    pub data_used: f64,
    /// No model could be fitted on this subset.
    pub unfittable: bool,
}

impl SubReport {
    fn from_report(r: &EvaluationReport, data_used: f64) -> Self {
        SubReport {
            confusion: Some(r.confusion),
            accuracy: Some(r.accuracy),
            data_used,
            unfittable: false,
        }
    }

    fn unfittable(data_used: f64) -> Self {
        SubReport {
            confusion: None,
            accuracy: None,
            data_used,
            unfittable: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseReport {
    pub all_data: SubReport,
    pub without_overlap: Option<SubReport>,
    pub overlap_only: Option<SubReport>,
    pub worst_case: Option<SubReport>,
    pub no_overlap: bool,
}

fn refit(d: &Dataset, m: &GlcModel) -> Result<Option<GlcModel>> {
    match fit_glc_lda(d, m.roles()) {
        Ok(model) => Ok(Some(model)),
        Err(GlcError::TooFewPoints { .. } | GlcError::SingleClass | GlcError::ZeroCoefficients) => {
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// Evaluates `m` on everything, refits LDA on the complement of the split
/// and on the split alone (each scored on its own data), and scores the
/// complement's model on the split.
pub fn worst_case_report(d: &Dataset, m: &GlcModel, split: &WorstCaseSplit) -> Result<WorstCaseReport> {
    let all = evaluate(m, d)?;
    let all_data = SubReport::from_report(&all, 1.0);
    if split.is_empty() {
        return Ok(WorstCaseReport {
            all_data,
            without_overlap: None,
            overlap_only: None,
            worst_case: None,
            no_overlap: true,
        });
    }
    let n = d.len() as f64;
    let complement = split.complement(d.len());
    let used_split = split.member_indices.len() as f64 / n;
    let used_rest = complement.len() as f64 / n;
    let inside = d.subset(&split.member_indices)?;

    let (without_overlap, worst_case) = if complement.is_empty() {
        (SubReport::unfittable(used_rest), SubReport::unfittable(used_split))
    } else {
        let rest = d.subset(&complement)?;
        match refit(&rest, m)? {
            Some(model) => (
                SubReport::from_report(&evaluate(&model, &rest)?, used_rest),
                SubReport::from_report(&evaluate(&model, &inside)?, used_split),
            ),
            None => (SubReport::unfittable(used_rest), SubReport::unfittable(used_split)),
        }
    };
    let overlap_only = match refit(&inside, m)? {
        Some(model) => SubReport::from_report(&evaluate(&model, &inside)?, used_split),
        None => SubReport::unfittable(used_split),
    };
    Ok(WorstCaseReport {
        all_data,
        without_overlap: Some(without_overlap),
        overlap_only: Some(overlap_only),
        worst_case: Some(worst_case),
        no_overlap: false,
    })
}
