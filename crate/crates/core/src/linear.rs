//! Linear discriminant functions in GLC-L form.
//!
//! A discriminant `F(x) = Σ c_i x_i` with threshold `T` is normalized to
//! `G(x) = Σ k_i x_i`, `k_i = c_i / |c_max|`. Every attribute gets the angle
//! `Q_i = arccos |k_i|` and a sign, so that the horizontal extent of its
//! segment in a GLC-L drawing is exactly `k_i x_i`. Class 1 is predicted when
//! `G(x) < T_norm`, which is the same decision as `F(x) < T_norm · |c_max|`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{GlcError, Result};

/// Ridge added to the pooled within-class covariance.
pub const LDA_RIDGE: f64 = 1e-6;

/// Which label plays class 1 (projected below the threshold) and which plays
/// class 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRoles {
    pub class1: String,
    pub class2: String,
}

impl ClassRoles {
    pub fn new(class1: impl Into<String>, class2: impl Into<String>) -> Self {
        ClassRoles {
            class1: class1.into(),
            class2: class2.into(),
        }
    }

    /// Roles for a two-class dataset: the first class in lexicographic order
    /// plays class 1.
    pub fn from_dataset(d: &Dataset) -> Result<Self> {
        let classes = d.classes();
        match classes.len() {
            2 => Ok(ClassRoles::new(classes[0].clone(), classes[1].clone())),
            1 => Err(GlcError::SingleClass),
            n => Err(GlcError::InvalidParameter(format!(
                "expected a two-class dataset, found {n} classes; binarize first"
            ))),
        }
    }

    /// Roles with `class1` fixed and the other class of `d` as class 2.
    pub fn with_class1(d: &Dataset, class1: &str) -> Result<Self> {
        let classes = d.classes();
        if !classes.iter().any(|c| c == class1) {
            return Err(GlcError::UnknownClass(class1.to_string()));
        }
        let others: Vec<&String> = classes.iter().filter(|c| *c != class1).collect();
        match others.as_slice() {
            [other] => Ok(ClassRoles::new(class1, (*other).clone())),
            [] => Err(GlcError::SingleClass),
            _ => Err(GlcError::InvalidParameter(format!(
                "expected a two-class dataset, found {} classes; binarize first",
                classes.len()
            ))),
        }
    }

    pub fn label(&self, role: Role) -> &str {
        match role {
            Role::Class1 => &self.class1,
            Role::Class2 => &self.class2,
        }
    }

    pub fn role_of(&self, label: &str) -> Option<Role> {
        if label == self.class1 {
            Some(Role::Class1)
        } else if label == self.class2 {
            Some(Role::Class2)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Class1,
    Class2,
}

impl Role {
    pub fn index(self) -> usize {
        match self {
            Role::Class1 => 0,
            Role::Class2 => 1,
        }
    }
}

/// A linear discriminant in GLC-L form.
#[derive(Debug, Clone, PartialEq)]
pub struct GlcModel {
    coefficients: Vec<f64>,
    k: Vec<f64>,
    c_max_abs: f64,
    angles: Vec<f64>,
    signs: Vec<f64>,
    threshold: f64,
    roles: ClassRoles,
}

impl GlcModel {
    /// Normalizes `coefficients` and sets the threshold (on the normalized
    /// projection axis) explicitly.
    pub fn from_coefficients(
        coefficients: Vec<f64>,
        threshold: f64,
        roles: ClassRoles,
    ) -> Result<Self> {
        let c_max_abs = coefficients.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if !(c_max_abs > 0.0) || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(GlcError::ZeroCoefficients);
        }
        let k: Vec<f64> = coefficients.iter().map(|c| c / c_max_abs).collect();
        let angles = k.iter().map(|ki| ki.abs().min(1.0).acos()).collect();
        let signs = k.iter().map(|&ki| if ki < 0.0 { -1.0 } else { 1.0 }).collect();
        Ok(GlcModel {
            coefficients,
            k,
            c_max_abs,
            angles,
            signs,
            threshold,
            roles,
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Normalized coefficients `k_i`.
    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn c_max_abs(&self) -> f64 {
        self.c_max_abs
    }

    /// Angles `Q_i` in radians, in `[0, π/2]`.
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn angles_deg(&self) -> Vec<f64> {
        self.angles.iter().map(|a| a.to_degrees()).collect()
    }

    /// `±1` per attribute; `+1` for a zero coefficient.
    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    /// Threshold on the normalized axis `U`.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Threshold for the raw discriminant `F`.
    pub fn raw_threshold(&self) -> f64 {
        self.threshold * self.c_max_abs
    }

    pub fn roles(&self) -> &ClassRoles {
        &self.roles
    }

    pub fn n_attributes(&self) -> usize {
        self.k.len()
    }

    pub fn with_threshold(&self, threshold: f64) -> Self {
        GlcModel {
            threshold,
            ..self.clone()
        }
    }

    /// Overrides one angle, keeping its sign: `k_i = sign_i · cos Q_i`.
    ///
    /// The other coefficients are left alone, so after an edit `max |k_i|`
    /// may drop below 1; the decision rule still reads `G(x) < T_norm`.
    pub fn with_angle(&self, index: usize, radians: f64) -> Result<Self> {
        if index >= self.k.len() {
            return Err(GlcError::InvalidParameter(format!(
                "angle index {index} out of range for {} attributes",
                self.k.len()
            )));
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&radians) {
            return Err(GlcError::InvalidParameter(format!(
                "angle must be within [0, 90] degrees, got {}",
                radians.to_degrees()
            )));
        }
        let radians = radians.min(std::f64::consts::FRAC_PI_2);
        let mut m = self.clone();
        m.angles[index] = radians;
        m.k[index] = m.signs[index] * radians.cos();
        m.coefficients[index] = m.k[index] * m.c_max_abs;
        Ok(m)
    }

    /// `G(x) = Σ k_i x_i`, summed in attribute order.
    pub fn project(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.k.len() {
            return Err(GlcError::DimensionMismatch {
                expected: self.k.len(),
                got: x.len(),
            });
        }
        Ok(self.k.iter().zip(x).map(|(k, v)| k * v).sum())
    }

    /// `F(x) = Σ c_i x_i`.
    pub fn raw_value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.k.len() {
            return Err(GlcError::DimensionMismatch {
                expected: self.k.len(),
                got: x.len(),
            });
        }
        Ok(self.coefficients.iter().zip(x).map(|(c, v)| c * v).sum())
    }

    pub fn role_for_projection(&self, u: f64) -> Role {
        if u < self.threshold {
            Role::Class1
        } else {
            Role::Class2
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<&str> {
        let u = self.project(x)?;
        Ok(self.roles.label(self.role_for_projection(u)))
    }

    pub fn export(&self) -> ModelExport {
        ModelExport {
            coefficients: self.coefficients.clone(),
            k: self.k.clone(),
            c_max_abs: self.c_max_abs,
            angles_deg: self.angles_deg(),
            signs: self.signs.clone(),
            threshold: self.threshold,
            class_roles: self.roles.clone(),
        }
    }
}

/// JSON layout of a model. Angles are exported in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelExport {
    pub coefficients: Vec<f64>,
    pub k: Vec<f64>,
    pub c_max_abs: f64,
    pub angles_deg: Vec<f64>,
    pub signs: Vec<f64>,
    pub threshold: f64,
    pub class_roles: ClassRoles,
}

impl TryFrom<ModelExport> for GlcModel {
    type Error = GlcError;

    fn try_from(e: ModelExport) -> Result<Self> {
        let n = e.k.len();
        if e.signs.len() != n || e.angles_deg.len() != n || e.coefficients.len() != n {
            return Err(GlcError::InvalidParameter(
                "model export fields have inconsistent lengths".into(),
            ));
        }
        if !(e.c_max_abs > 0.0) {
            return Err(GlcError::ZeroCoefficients);
        }
        Ok(GlcModel {
            angles: e.angles_deg.iter().map(|d| d.to_radians()).collect(),
            coefficients: e.coefficients,
            k: e.k,
            c_max_abs: e.c_max_abs,
            signs: e.signs,
            threshold: e.threshold,
            roles: e.class_roles,
        })
    }
}

impl Serialize for GlcModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.export().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GlcModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let e = ModelExport::deserialize(d)?;
        GlcModel::try_from(e).map_err(serde::de::Error::custom)
    }
}

fn check_roles_cover(d: &Dataset, roles: &ClassRoles) -> Result<()> {
    if let Some(l) = d.labels().iter().find(|l| roles.role_of(l).is_none()) {
        return Err(GlcError::InvalidParameter(format!(
            "label {l:?} is neither class role ({:?}, {:?})",
            roles.class1, roles.class2
        )));
    }
    Ok(())
}

/// Fisher discriminant direction `C = (S_w + λI)^-1 (μ₂ − μ₁)`, with `S_w`
/// the pooled within-class covariance and λ = [`LDA_RIDGE`].
///
/// The difference is taken class 2 minus class 1 so that class 1 ends up on
/// the low side of the projection, matching the `G(x) < T` rule.
pub fn fit_lda(d: &Dataset, roles: &ClassRoles) -> Result<Vec<f64>> {
    check_roles_cover(d, roles)?;
    let n = d.n_attributes();
    let mut groups: [Vec<&[f64]>; 2] = [Vec::new(), Vec::new()];
    for (p, l) in d.points().iter().zip(d.labels()) {
        let role = roles.role_of(l).expect("checked above");
        groups[role.index()].push(p);
    }
    for (g, label) in groups.iter().zip([&roles.class1, &roles.class2]) {
        if g.len() < 2 {
            return Err(GlcError::TooFewPoints {
                class: label.clone(),
                count: g.len(),
                required: 2,
            });
        }
    }

    let means: Vec<DVector<f64>> = groups
        .iter()
        .map(|g| {
            let mut m = DVector::zeros(n);
            for p in g {
                for (i, v) in p.iter().enumerate() {
                    m[i] += v;
                }
            }
            m / g.len() as f64
        })
        .collect();

    let mut scatter = DMatrix::<f64>::zeros(n, n);
    for (g, mean) in groups.iter().zip(&means) {
        for p in g {
            for i in 0..n {
                let di = p[i] - mean[i];
                for j in i..n {
                    scatter[(i, j)] += di * (p[j] - mean[j]);
                }
            }
        }
    }
    let dof = (groups[0].len() + groups[1].len() - 2) as f64;
    for i in 0..n {
        for j in i..n {
            let v = scatter[(i, j)] / dof;
            scatter[(i, j)] = v;
            scatter[(j, i)] = v;
        }
        scatter[(i, i)] += LDA_RIDGE;
    }

    let diff = &means[1] - &means[0];
    let solved = match scatter.clone().cholesky() {
        Some(ch) => Some(ch.solve(&diff)),
        None => scatter.lu().solve(&diff),
    };
    let c: Vec<f64> = solved
        .ok_or_else(|| GlcError::InvalidParameter("singular within-class covariance".into()))?
        .iter()
        .copied()
        .collect();
    if c.iter().any(|v| !v.is_finite()) || c.iter().all(|v| *v == 0.0) {
        return Err(GlcError::ZeroCoefficients);
    }
    Ok(c)
}

/// Result of the threshold sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdChoice {
    pub threshold: f64,
    pub correct: usize,
    pub accuracy: f64,
}

/// Picks the accuracy-maximizing threshold for `u < T → class 1`.
///
/// Candidates are the midpoints between adjacent distinct projections plus
/// one point beyond each extreme. Ties go to the candidate nearest the middle
/// of the projection range, then to the lower candidate.
pub fn sweep_threshold(projections: &[f64], roles: &[Role]) -> ThresholdChoice {
    assert_eq!(projections.len(), roles.len());
    let total = projections.len();
    if total == 0 {
        return ThresholdChoice {
            threshold: 0.0,
            correct: 0,
            accuracy: 0.0,
        };
    }
    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by(|&a, &b| projections[a].total_cmp(&projections[b]));
    let lo = projections[order[0]];
    let hi = projections[order[total - 1]];
    let range = hi - lo;
    let pad = 0.05 * if range > 0.0 { range } else { 1.0 };
    let centre = 0.5 * (lo + hi);

    let class2_total = roles.iter().filter(|r| **r == Role::Class2).count();
    // threshold below everything: all predicted class 2
    let mut best = ThresholdChoice {
        threshold: lo - pad,
        correct: class2_total,
        accuracy: 0.0,
    };
    let consider = |t: f64, correct: usize, best: &mut ThresholdChoice| {
        let better = correct > best.correct
            || (correct == best.correct && {
                let (dn, db) = ((t - centre).abs(), (best.threshold - centre).abs());
                dn < db || (dn == db && t < best.threshold)
            });
        if better {
            best.threshold = t;
            best.correct = correct;
        }
    };

    let mut class1_below = 0usize;
    let mut class2_below = 0usize;
    let mut i = 0;
    while i < total {
        let v = projections[order[i]];
        while i < total && projections[order[i]] == v {
            match roles[order[i]] {
                Role::Class1 => class1_below += 1,
                Role::Class2 => class2_below += 1,
            }
            i += 1;
        }
        let correct = class1_below + (class2_total - class2_below);
        let t = if i < total {
            0.5 * (v + projections[order[i]])
        } else {
            hi + pad
        };
        consider(t, correct, &mut best);
    }
    best.accuracy = best.correct as f64 / total as f64;
    best
}

/// Builds the GLC-L model for `coefficients` and places the threshold with
/// [`sweep_threshold`] over the projections of `d`.
pub fn make_glc_model(coefficients: Vec<f64>, d: &Dataset, roles: &ClassRoles) -> Result<GlcModel> {
    if coefficients.len() != d.n_attributes() {
        return Err(GlcError::DimensionMismatch {
            expected: d.n_attributes(),
            got: coefficients.len(),
        });
    }
    check_roles_cover(d, roles)?;
    let model = GlcModel::from_coefficients(coefficients, 0.0, roles.clone())?;
    let projections: Vec<f64> = d
        .points()
        .iter()
        .map(|p| model.project(p))
        .collect::<Result<_>>()?;
    let point_roles: Vec<Role> = d
        .labels()
        .iter()
        .map(|l| roles.role_of(l).expect("checked above"))
        .collect();
    let choice = sweep_threshold(&projections, &point_roles);
    Ok(model.with_threshold(choice.threshold))
}

/// `fit_lda` followed by `make_glc_model`.
pub fn fit_glc_lda(d: &Dataset, roles: &ClassRoles) -> Result<GlcModel> {
    let c = fit_lda(d, roles)?;
    make_glc_model(c, d, roles)
}

/// Confusion matrix and per-point projections of a model on a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    /// `[class1, class2]` labels; rows and columns of `confusion` follow it.
    pub classes: [String; 2],
    /// `confusion[real][predicted]`.
    pub confusion: [[usize; 2]; 2],
    pub accuracy: f64,
    pub misclassified_indices: Vec<usize>,
    pub projections: Vec<f64>,
}

impl EvaluationReport {
    pub fn total(&self) -> usize {
        self.confusion.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        self.confusion[0][0] + self.confusion[1][1]
    }
}

pub fn evaluate(m: &GlcModel, d: &Dataset) -> Result<EvaluationReport> {
    check_roles_cover(d, m.roles())?;
    let mut confusion = [[0usize; 2]; 2];
    let mut misclassified = Vec::new();
    let mut projections = Vec::with_capacity(d.len());
    for (i, (p, l)) in d.points().iter().zip(d.labels()).enumerate() {
        let u = m.project(p)?;
        let real = m.roles().role_of(l).expect("checked above");
        let pred = m.role_for_projection(u);
        confusion[real.index()][pred.index()] += 1;
        if real != pred {
            misclassified.push(i);
        }
        projections.push(u);
    }
    let total = d.len();
    Ok(EvaluationReport {
        classes: [m.roles().class1.clone(), m.roles().class2.clone()],
        confusion,
        accuracy: (confusion[0][0] + confusion[1][1]) as f64 / total as f64,
        misclassified_indices: misclassified,
        projections,
    })
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
    fn normalization_and_angles() {
        let roles = ClassRoles::new("a", "b");
        let m = GlcModel::from_coefficients(vec![2.0, -4.0, 1.0], 0.0, roles).unwrap();
        assert_eq!(m.c_max_abs(), 4.0);
        assert_eq!(m.k(), [0.5, -1.0, 0.25]);
        assert!((m.angles()[0] - std::f64::consts::FRAC_PI_3).abs() < 1e-12);
        assert_eq!(m.angles()[1], 0.0);
        assert!((m.angles()[2] - 1.3181).abs() < 1e-4);
        assert_eq!(m.signs(), [1.0, -1.0, 1.0]);
        for i in 0..3 {
            assert!((m.angles()[i].cos() * m.signs()[i] - m.k()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_coefficients() {
        let m = GlcModel::from_coefficients(vec![1.0; 4], 0.0, ClassRoles::new("a", "b")).unwrap();
        assert!(m.angles().iter().all(|&q| q == 0.0));
        assert_eq!(m.project(&[1.0, 1.0, 1.0, 1.0]).unwrap(), 4.0);
    }

    #[test]
    fn projection_arithmetic() {
        let m = GlcModel::from_coefficients(vec![0.5, 1.0], 0.0, ClassRoles::new("a", "b")).unwrap();
        assert!((m.project(&[0.4, 0.5]).unwrap() - 0.7).abs() < 1e-15);
        assert!(matches!(
            m.project(&[1.0]),
            Err(GlcError::DimensionMismatch { .. })
        ));
        let z = GlcModel::from_coefficients(vec![1.0, 0.0], 0.0, ClassRoles::new("a", "b")).unwrap();
        assert_eq!(z.project(&[0.3, 0.1]).unwrap(), z.project(&[0.3, 0.9]).unwrap());
    }

    #[test]
    fn zero_coefficients_rejected() {
        assert!(matches!(
            GlcModel::from_coefficients(vec![0.0, 0.0], 0.0, ClassRoles::new("a", "b")),
            Err(GlcError::ZeroCoefficients)
        ));
    }

    #[test]
    fn lda_symmetric_toy_separates_on_first_axis() {
        let d = ds(
            vec![vec![-1.0, 0.1], vec![-1.0, -0.1], vec![1.0, 0.1], vec![1.0, -0.1]],
            &["a", "a", "b", "b"],
        );
        let c = fit_lda(&d, &ClassRoles::new("a", "b")).unwrap();
        assert!(c[0] > 0.0);
        assert!((c[1] / c[0]).abs() < 1e-6);
    }

    #[test]
    fn lda_needs_two_points_per_class() {
        let d = ds(vec![vec![0.0], vec![1.0], vec![2.0]], &["a", "b", "b"]);
        assert!(matches!(
            fit_lda(&d, &ClassRoles::new("a", "b")),
            Err(GlcError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn equivalence_worked_example() {
        // C = (2, 4), T = 3, x = (0.4, 0.5): F = 2.8 < 3, G = 0.7 < 0.75
        let m = GlcModel::from_coefficients(vec![2.0, 4.0], 0.75, ClassRoles::new("a", "b")).unwrap();
        let x = [0.4, 0.5];
        assert!((m.raw_value(&x).unwrap() - 2.8).abs() < 1e-12);
        assert!((m.project(&x).unwrap() - 0.7).abs() < 1e-12);
        assert_eq!(m.raw_threshold(), 3.0);
        assert_eq!(m.predict(&x).unwrap(), "a");
    }

    #[test]
    fn exact_threshold_is_class_two() {
        let m = GlcModel::from_coefficients(vec![1.0], 0.5, ClassRoles::new("a", "b")).unwrap();
        assert_eq!(m.predict(&[0.5]).unwrap(), "b");
        assert_eq!(m.predict(&[0.4999]).unwrap(), "a");
    }

    #[test]
    fn one_dimensional_sweep() {
        let d = ds(
            vec![vec![0.1], vec![0.2], vec![0.8], vec![0.9]],
            &["a", "a", "b", "b"],
        );
        let roles = ClassRoles::new("a", "b");
        let m = make_glc_model(vec![1.0], &d, &roles).unwrap();
        assert!(m.threshold() > 0.2 && m.threshold() < 0.8);
        let r = evaluate(&m, &d).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert!(r.misclassified_indices.is_empty());
        assert_eq!(r.confusion, [[2, 0], [0, 2]]);
    }

    #[test]
    fn sweep_tie_prefers_centre() {
        // perfectly separable at the only gap; all other candidates are worse
        let c = sweep_threshold(&[0.0, 1.0], &[Role::Class1, Role::Class2]);
        assert_eq!(c.threshold, 0.5);
        // all one class: every candidate on the class-2 side scores the same
        let c = sweep_threshold(&[0.0, 1.0, 2.0], &[Role::Class2; 3]);
        assert_eq!(c.correct, 3);
        assert!(c.threshold < 0.0);
    }

    #[test]
    fn evaluate_rejects_foreign_labels() {
        let d = ds(vec![vec![0.1], vec![0.9]], &["a", "c"]);
        let m = GlcModel::from_coefficients(vec![1.0], 0.5, ClassRoles::new("a", "b")).unwrap();
        assert!(evaluate(&m, &d).is_err());
    }

    #[test]
    fn angle_edit_keeps_sign() {
        let m = GlcModel::from_coefficients(vec![-1.0, 0.5], 0.0, ClassRoles::new("a", "b")).unwrap();
        let e = m.with_angle(0, std::f64::consts::FRAC_PI_3).unwrap();
        assert!((e.k()[0] + 0.5).abs() < 1e-12);
        assert!((e.coefficients()[0] + 0.5).abs() < 1e-12);
        assert!(m.with_angle(5, 0.1).is_err());
        assert!(m.with_angle(0, 2.0).is_err());
    }

    #[test]
    fn export_roundtrip() {
        let m = GlcModel::from_coefficients(vec![2.0, -4.0, 1.0], 0.3, ClassRoles::new("a", "b")).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: GlcModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back.k(), m.k());
        assert_eq!(back.threshold(), m.threshold());
        for (a, b) in back.angles().iter().zip(m.angles()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
