//! k-fold cross-validation and baseline classifiers.

pub mod classifiers;
pub mod folds;
pub mod harness;

pub use classifiers::{baseline_predict, knn_predict, train, ClassifierSpec, GaussianNb, Trained};
pub use folds::FoldPlan;
pub use harness::{
    compare_on_split, cross_validate, external_cv_result, external_split_accuracy, load_external_predictions,
    mean_std, CvResult, CvTable, ExternalPrediction, SplitComparison, SplitComparisonRow,
};
