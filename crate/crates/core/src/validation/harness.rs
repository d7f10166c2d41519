use std::io::Read;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{GlcError, Result};
use crate::linear::ClassRoles;
use crate::validation::classifiers::{train, ClassifierSpec};
use crate::validation::folds::FoldPlan;
use crate::worst_case::WorstCaseSplit;

/// Mean and sample standard deviation (`n − 1`) of `values`.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Per-fold accuracies of one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub model: String,
    /// `None` for folds where the model could not be trained.
    pub fold_accuracies: Vec<Option<f64>>,
    pub mean: f64,
    pub std: f64,
    pub warnings: Vec<String>,
}

impl CvResult {
    fn from_folds(model: String, folds: Vec<Option<f64>>, warnings: Vec<String>) -> Self {
        let valid: Vec<f64> = folds.iter().flatten().copied().collect();
        let (mean, std) = mean_std(&valid);
        CvResult {
            model,
            fold_accuracies: folds,
            mean,
            std,
            warnings,
        }
    }
}

fn unfittable(e: &GlcError) -> bool {
    matches!(
        e,
        GlcError::TooFewPoints { .. }
            | GlcError::SingleClass
            | GlcError::ZeroCoefficients
            | GlcError::EmptySupportVectors
    )
}

/// Trains on all folds but one and scores the held-out fold, for every fold.
///
/// Class roles come from the sorted labels of the whole dataset. A fold
/// whose training part holds a single class, or on which the model cannot be
/// fitted, is reported as `None` and left out of the mean.
pub fn cross_validate(d: &Dataset, spec: &ClassifierSpec, plan: &FoldPlan) -> Result<CvResult> {
    if plan.assignments.len() != d.len() {
        return Err(GlcError::DimensionMismatch {
            expected: d.len(),
            got: plan.assignments.len(),
        });
    }
    let roles = ClassRoles::from_dataset(d);
    let outcomes: Vec<Result<std::result::Result<f64, String>>> = (0..plan.k)
        .into_par_iter()
        .map(|f| {
            let test_idx = plan.test_indices(f);
            if test_idx.is_empty() {
                return Ok(Err(format!("fold {} is empty", f + 1)));
            }
            let tr = d.subset(&plan.train_indices(f))?;
            if tr.classes().len() < 2 {
                return Ok(Err(format!("fold {}: training data has a single class", f + 1)));
            }
            let te = d.subset(&test_idx)?;
            match train(spec, &tr, roles.as_ref().ok(), plan.seed) {
                Ok(model) => Ok(Ok(model.accuracy(&te)?)),
                Err(e) if unfittable(&e) => Ok(Err(format!("fold {}: {e}", f + 1))),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut folds = Vec::with_capacity(plan.k);
    let mut warnings = Vec::new();
    for o in outcomes {
        match o? {
            Ok(a) => folds.push(Some(a)),
            Err(w) => {
                folds.push(None);
                warnings.push(w);
            }
        }
    }
    Ok(CvResult::from_folds(spec.to_string(), folds, warnings))
}

/// Models × folds, with per-model and per-fold summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvTable {
    pub k: usize,
    pub rows: Vec<CvResult>,
    pub fold_mean: Vec<Option<f64>>,
    pub fold_std: Vec<Option<f64>>,
}

impl CvTable {
    pub fn new(k: usize, rows: Vec<CvResult>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.fold_accuracies.len() != k) {
            return Err(GlcError::DimensionMismatch {
                expected: k,
                got: r.fold_accuracies.len(),
            });
        }
        let mut fold_mean = Vec::with_capacity(k);
        let mut fold_std = Vec::with_capacity(k);
        for f in 0..k {
            let vals: Vec<f64> = rows.iter().filter_map(|r| r.fold_accuracies[f]).collect();
            if vals.is_empty() {
                fold_mean.push(None);
                fold_std.push(None);
            } else {
                let (m, s) = mean_std(&vals);
                fold_mean.push(Some(m));
                fold_std.push(Some(s));
            }
        }
        Ok(CvTable {
            k,
            rows,
            fold_mean,
            fold_std,
        })
    }

    /// Cross-validates every spec on the same plan.
    pub fn run(d: &Dataset, specs: &[ClassifierSpec], plan: &FoldPlan) -> Result<Self> {
        let rows = specs
            .iter()
            .map(|s| cross_validate(d, s, plan))
            .collect::<Result<Vec<_>>>()?;
        CvTable::new(plan.k, rows)
    }

    /// Percentages with two decimals: one row per model (folds, Avg,
    /// St.Dev), then `Avg` and `St.Dev` rows over the models.
    pub fn to_csv(&self) -> String {
        let pct = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{:.2}", 100.0 * x));
        let mut out = String::from("Model");
        for f in 1..=self.k {
            out.push_str(&format!(",Fold {f}"));
        }
        out.push_str(",Avg,St.Dev\n");
        for r in &self.rows {
            out.push_str(&csv_field(&r.model));
            for a in &r.fold_accuracies {
                out.push(',');
                out.push_str(&pct(*a));
            }
            out.push_str(&format!(",{},{}\n", pct(finite(r.mean)), pct(finite(r.std))));
        }
        for (name, vals) in [("Avg", &self.fold_mean), ("St.Dev", &self.fold_std)] {
            out.push_str(name);
            for v in vals {
                out.push(',');
                out.push_str(&pct(*v));
            }
            out.push_str(",,\n");
        }
        out
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Accuracy of each model trained on the complement of a split and tested
/// on its members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitComparison {
    pub rows: Vec<SplitComparisonRow>,
    pub average: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitComparisonRow {
    pub model: String,
    pub accuracy: Option<f64>,
}

pub fn compare_on_split(
    split: &WorstCaseSplit,
    d: &Dataset,
    specs: &[ClassifierSpec],
    seed: u64,
) -> Result<SplitComparison> {
    if split.is_empty() {
        return Err(GlcError::EmptySplit);
    }
    let complement = split.complement(d.len());
    if complement.is_empty() {
        return Err(GlcError::EmptyComplement);
    }
    let tr = d.subset(&complement)?;
    let te = d.subset(&split.member_indices)?;
    let roles = ClassRoles::from_dataset(d).ok();
    let rows = specs
        .par_iter()
        .map(|s| {
            let accuracy = match train(s, &tr, roles.as_ref(), seed) {
                Ok(m) => Some(m.accuracy(&te)?),
                Err(e) if unfittable(&e) => None,
                Err(e) => return Err(e),
            };
            Ok(SplitComparisonRow {
                model: s.to_string(),
                accuracy,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let vals: Vec<f64> = rows.iter().filter_map(|r| r.accuracy).collect();
    Ok(SplitComparison {
        average: mean_std(&vals).0,
        rows,
    })
}

/// One prediction produced by an outside model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalPrediction {
    pub point_index: usize,
    pub predicted_label: String,
    pub fold: Option<usize>,
}

/// Reads `point_index,predicted_label[,fold]` rows (with a header). Folds
/// are 1-based in the file.
pub fn load_external_predictions<R: Read>(source: R) -> Result<Vec<ExternalPrediction>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source);
    let mut out = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let row = r + 2;
        let rec = rec.map_err(|e| GlcError::Csv {
            row,
            column: 0,
            message: e.to_string(),
        })?;
        if rec.len() < 2 || rec.len() > 3 {
            return Err(GlcError::Csv {
                row,
                column: rec.len(),
                message: "expected point_index,predicted_label[,fold]".into(),
            });
        }
        let num = |c: usize, what: &str| -> Result<usize> {
            rec[c].parse().map_err(|_| GlcError::NonNumeric {
                row,
                column: c + 1,
                attribute: what.into(),
                value: rec[c].to_string(),
            })
        };
        let fold = if rec.len() == 3 && !rec[2].is_empty() {
            let f = num(2, "fold")?;
            if f == 0 {
                return Err(GlcError::InvalidParameter(format!("row {row}: folds are 1-based")));
            }
            Some(f - 1)
        } else {
            None
        };
        out.push(ExternalPrediction {
            point_index: num(0, "point_index")?,
            predicted_label: rec[1].to_string(),
            fold,
        });
    }
    Ok(out)
}

/// Per-fold accuracy of external predictions. A prediction's fold is taken
/// from the file when given, otherwise from `plan`.
pub fn external_cv_result(
    model: &str,
    d: &Dataset,
    plan: &FoldPlan,
    predictions: &[ExternalPrediction],
) -> Result<CvResult> {
    let mut correct = vec![0usize; plan.k];
    let mut total = vec![0usize; plan.k];
    for p in predictions {
        if p.point_index >= d.len() {
            return Err(GlcError::PointNotFound(format!("index {}", p.point_index)));
        }
        let f = p.fold.unwrap_or(plan.assignments[p.point_index]);
        if f >= plan.k {
            return Err(GlcError::InvalidParameter(format!("fold {} exceeds k = {}", f + 1, plan.k)));
        }
        total[f] += 1;
        correct[f] += (d.label(p.point_index) == p.predicted_label) as usize;
    }
    let folds = (0..plan.k)
        .map(|f| (total[f] > 0).then(|| correct[f] as f64 / total[f] as f64))
        .collect();
    Ok(CvResult::from_folds(model.to_string(), folds, Vec::new()))
}

/// Accuracy of external predictions on the members of a split.
pub fn external_split_accuracy(
    split: &WorstCaseSplit,
    d: &Dataset,
    predictions: &[ExternalPrediction],
) -> Result<Option<f64>> {
    let mut member = vec![false; d.len()];
    for &i in &split.member_indices {
        member[i] = true;
    }
    let (mut correct, mut total) = (0usize, 0usize);
    for p in predictions {
        if p.point_index >= d.len() {
            return Err(GlcError::PointNotFound(format!("index {}", p.point_index)));
        }
        if member[p.point_index] {
            total += 1;
            correct += (d.label(p.point_index) == p.predicted_label) as usize;
        }
    }
    Ok((total > 0).then(|| correct as f64 / total as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable() -> Dataset {
        let n = 20;
        Dataset::new(
            "sep",
            vec!["x".into(), "y".into()],
            (0..n)
                .map(|i| {
                    let t = (i % 10) as f64 * 0.01;
                    if i < 10 {
                        vec![0.1 + t, 0.2 + t]
                    } else {
                        vec![0.8 + t, 0.7 + t]
                    }
                })
                .collect(),
            (0..n).map(|i| if i < 10 { "a".into() } else { "b".into() }).collect(),
        )
        .unwrap()
    }

    #[test]
    fn sample_std() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_std(&[0.7]), (0.7, 0.0));
    }

    #[test]
    fn separable_all_ones() {
        let d = separable();
        let plan = FoldPlan::new(&d, 5, 3, true).unwrap();
        let t = CvTable::run(&d, &ClassifierSpec::builtin(), &plan).unwrap();
        for r in &t.rows {
            assert!(r.fold_accuracies.iter().all(|a| *a == Some(1.0)), "{}", r.model);
            assert_eq!(r.std, 0.0);
        }
        let csv = t.to_csv();
        assert!(csv.starts_with("Model,Fold 1,Fold 2,Fold 3,Fold 4,Fold 5,Avg,St.Dev\n"));
        assert!(csv.contains("\nLDA,100.00,"));
        assert!(csv.contains("\nSt.Dev,0.00,"));
    }

    #[test]
    fn single_class_training_fold_is_skipped() {
        let d = Dataset::new(
            "t",
            vec!["x".into()],
            vec![vec![0.1], vec![0.2], vec![0.3], vec![0.9]],
            vec!["a".into(), "a".into(), "a".into(), "b".into()],
        )
        .unwrap();
        let plan = FoldPlan {
            k: 2,
            seed: 0,
            stratified: false,
            assignments: vec![0, 0, 0, 1],
        };
        let r = cross_validate(&d, &ClassifierSpec::Knn { k: 1 }, &plan).unwrap();
        assert_eq!(r.fold_accuracies[1], None);
        assert_eq!(r.warnings.len(), 2);
    }

    #[test]
    fn compare_preconditions() {
        let d = separable();
        let mut split = WorstCaseSplit {
            lower: 0.0,
            upper: 1.0,
            member_indices: vec![],
            capped: false,
            cap_fraction: 0.9,
        };
        assert!(matches!(
            compare_on_split(&split, &d, &ClassifierSpec::builtin(), 0),
            Err(GlcError::EmptySplit)
        ));
        split.member_indices = (0..d.len()).collect();
        assert!(matches!(
            compare_on_split(&split, &d, &ClassifierSpec::builtin(), 0),
            Err(GlcError::EmptyComplement)
        ));
        split.member_indices = vec![0, 1, 18, 19];
        let t = compare_on_split(&split, &d, &ClassifierSpec::builtin(), 0).unwrap();
        assert!(t.rows.iter().all(|r| r.accuracy == Some(1.0)));
        assert_eq!(t.average, 1.0);
    }

    #[test]
    fn external_predictions() {
        let d = separable();
        let csv = "point_index,predicted_label,fold\n0,a,1\n1,b,1\n12,b,2\n";
        let preds = load_external_predictions(csv.as_bytes()).unwrap();
        assert_eq!(preds[2].fold, Some(1));
        let plan = FoldPlan::new(&d, 2, 0, true).unwrap();
        let r = external_cv_result("ext", &d, &plan, &preds).unwrap();
        assert_eq!(r.fold_accuracies, vec![Some(0.5), Some(1.0)]);
        let split = WorstCaseSplit {
            lower: 0.0,
            upper: 0.0,
            member_indices: vec![1, 12],
            capped: false,
            cap_fraction: 0.9,
        };
        assert_eq!(external_split_accuracy(&split, &d, &preds).unwrap(), Some(0.5));
        assert!(load_external_predictions("i,l\nx,a\n".as_bytes()).is_err());
    }
}
