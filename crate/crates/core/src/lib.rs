//! General Line Coordinates for interpretable two-class models.
//!
//! Datasets of normalized n-D points are drawn as 2-D polylines whose
//! endpoints project onto the value of a linear discriminant. Around that
//! picture the crate builds linear and kernel-expanded discriminants,
//! hyperblock interval rules, worst-case validation splits and a k-fold
//! harness with a few baseline classifiers.
//!
//! ```
//! use glc_core::data::Dataset;
//! use glc_core::linear::{fit_glc_lda, evaluate, ClassRoles};
//!
//! let d = Dataset::new(
//!     "toy",
//!     vec!["a".into(), "b".into()],
//!     vec![vec![0.1, 0.2], vec![0.2, 0.1], vec![0.8, 0.9], vec![0.9, 0.7]],
//!     vec!["x".into(), "x".into(), "y".into(), "y".into()],
//! )
//! .unwrap();
//! let roles = ClassRoles::from_dataset(&d).unwrap();
//! let model = fit_glc_lda(&d, &roles).unwrap();
//! assert_eq!(evaluate(&model, &d).unwrap().accuracy, 1.0);
//! ```

// NaN-rejecting guards are written as `!(a <= b)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod geometry;
pub mod hyperblock;
pub mod kernel;
pub mod linear;
pub mod pca;
pub mod pipeline;
pub mod validation;
pub mod worst_case;

pub use data::{binarize, load_csv, normalize_minmax, BinarizationSpec, Dataset, LabelColumn};
pub use error::{ErrorKind, GlcError, Result};
pub use linear::{evaluate, fit_glc_lda, fit_lda, make_glc_model, ClassRoles, EvaluationReport, GlcModel, Role};
