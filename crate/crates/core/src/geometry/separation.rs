//! Pulling two hyperblocks apart vertically in a GLC-L scene.
//!
//! Two blocks that are disjoint in n-D may still overlap in the drawing.
//! Attributes on which their intervals do not intersect are separating
//! attributes. Their values are duplicated, scaled, and drawn as vertical
//! segments at the start of every polyline of the upper block (HB1), which
//! lifts it clear of HB2 without moving any endpoint horizontally.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{GlcError, Result};
use crate::geometry::glcl::{build_polyline, endpoint_height};
use crate::geometry::scene::{Scene, SceneMode, ScenePolyline};
use crate::hyperblock::Hyperblock;
use crate::linear::GlcModel;

/// Fraction of the scene height added as a gap between the two blocks.
pub const SEPARATION_MARGIN: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationTransform {
    pub separating_attributes: Vec<usize>,
    pub scaling_value: f64,
    /// Position (0 or 1) of HB1 among the two blocks passed in.
    pub hb1_id: usize,
    pub hb2_id: usize,
    /// Duplicated and scaled separating values `h` of every HB1 point.
    pub duplicated_attribute_values: BTreeMap<usize, Vec<f64>>,
    pub hb1_y_range: (f64, f64),
    pub hb2_y_range: (f64, f64),
}

impl SeparationTransform {
    /// The first separating attribute.
    pub fn separating_attribute(&self) -> usize {
        self.separating_attributes[0]
    }
}

pub fn separating_attributes(a: &Hyperblock, b: &Hyperblock) -> Vec<usize> {
    (0..a.n_attributes())
        .filter(|&i| a.upper[i] < b.lower[i] || b.upper[i] < a.lower[i])
        .collect()
}

/// Separates `first` and `second` in the GLC-L drawing of their members.
///
/// HB1 is the block whose upper bound has the larger sum over the separating
/// attributes. With `y(·)` the unmirrored endpoint height, the scaling value
/// is `(max(y(upper HB2) − y(lower HB1), 0) + ε) / S`, where `S` is the sum of
/// HB1's lower bound over the separating attributes and `ε` is 1% of the
/// scene height. Every HB1 point then starts with vertical segments
/// `h_i = scaling · x_i`, one per separating attribute, and every HB1 point
/// ends strictly above every HB2 point.
pub fn separate_hyperblocks(
    first: &Hyperblock,
    second: &Hyperblock,
    m: &GlcModel,
    d: &Dataset,
) -> Result<(SeparationTransform, Scene)> {
    let n = d.n_attributes();
    if first.n_attributes() != n || second.n_attributes() != n || m.n_attributes() != n {
        return Err(GlcError::DimensionMismatch {
            expected: n,
            got: first.n_attributes().min(second.n_attributes()).min(m.n_attributes()),
        });
    }
    let sep = separating_attributes(first, second);
    if sep.is_empty() {
        return Err(GlcError::HyperblocksOverlap);
    }
    let sum = |v: &[f64]| sep.iter().map(|&i| v[i]).sum::<f64>();
    let (hb1_id, hb2_id) = if sum(&second.upper) > sum(&first.upper) {
        (1, 0)
    } else {
        (0, 1)
    };
    let blocks = [first, second];
    let (hb1, hb2) = (blocks[hb1_id], blocks[hb2_id]);
    let s_low = sum(&hb1.lower);
    if s_low <= 1e-12 {
        return Err(GlcError::DegenerateSeparation(s_low));
    }

    let mut indices: Vec<usize> = hb1
        .member_indices
        .iter()
        .chain(&hb2.member_indices)
        .copied()
        .collect();
    indices.sort_unstable();
    indices.dedup();
    let heights: Vec<f64> = indices.iter().map(|&i| endpoint_height(d.point(i), m)).collect();
    let (hmin, hmax) = heights
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &h| (lo.min(h), hi.max(h)));
    let scene_height = if hmax > hmin { hmax - hmin } else { 0.0 };
    let eps = if scene_height > 0.0 {
        SEPARATION_MARGIN * scene_height
    } else {
        SEPARATION_MARGIN
    };
    let gap = endpoint_height(&hb2.upper, m) - endpoint_height(&hb1.lower, m);
    let scaling_value = (gap.max(0.0) + eps) / s_low;

    let mut in_hb1 = vec![false; d.len()];
    for &i in &hb1.member_indices {
        in_hb1[i] = true;
    }

    let mut polylines = Vec::with_capacity(indices.len());
    let mut duplicated = BTreeMap::new();
    let mut r1 = (f64::INFINITY, f64::NEG_INFINITY);
    let mut r2 = (f64::INFINITY, f64::NEG_INFINITY);
    for &i in &indices {
        let x = d.point(i);
        let base = build_polyline(x, m, false)?;
        let mut vertices = vec![[0.0, 0.0]];
        let mut lift = 0.0;
        if in_hb1[i] {
            let h: Vec<f64> = sep.iter().map(|&a| scaling_value * x[a]).collect();
            for v in &h {
                lift += v;
                vertices.push([0.0, lift]);
            }
            duplicated.insert(i, h);
        }
        vertices.extend(base.vertices[1..].iter().map(|&[vx, vy]| [vx, vy + lift]));
        let end_y = vertices.last().expect("vertices")[1];
        let r = if in_hb1[i] { &mut r1 } else { &mut r2 };
        r.0 = r.0.min(end_y);
        r.1 = r.1.max(end_y);
        polylines.push(ScenePolyline {
            vertices,
            class: d.label(i).to_string(),
            mirrored: false,
            endpoint_projection: base.endpoint_projection,
            source_index: i,
        });
    }

    let legend = BTreeMap::from([
        (m.roles().class1.clone(), "class1".to_string()),
        (m.roles().class2.clone(), "class2".to_string()),
    ]);
    let scene = Scene::assemble(SceneMode::Separation, polylines, Some(m.threshold()), None, legend);
    Ok((
        SeparationTransform {
            separating_attributes: sep,
            scaling_value,
            hb1_id,
            hb2_id,
            duplicated_attribute_values: duplicated,
            hb1_y_range: r1,
            hb2_y_range: r2,
        },
        scene,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperblock::Algorithm;
    use crate::linear::ClassRoles;

    fn fixture() -> (Dataset, GlcModel, Hyperblock, Hyperblock) {
        // HB1 high on x1, HB2 low on x1, identical ranges elsewhere; the
        // heavy x2 makes HB2 draw above HB1 before the transform
        let d = Dataset::new(
            "sep",
            vec!["x1".into(), "x2".into(), "x3".into()],
            vec![
                vec![0.8, 0.1, 0.5],
                vec![1.0, 0.2, 0.6],
                vec![0.0, 0.9, 0.5],
                vec![0.2, 1.0, 0.6],
            ],
            vec!["a".into(), "a".into(), "b".into(), "b".into()],
        )
        .unwrap();
        let m = GlcModel::from_coefficients(vec![0.9, 0.2, 0.4], 0.5, ClassRoles::new("a", "b")).unwrap();
        let hb1 = Hyperblock::from_bounds(vec![0.8, 0.1, 0.5], vec![1.0, 0.2, 0.6], "a", None, Algorithm::Irl, &d).unwrap();
        let hb2 = Hyperblock::from_bounds(vec![0.0, 0.9, 0.5], vec![0.2, 1.0, 0.6], "b", None, Algorithm::Irl, &d).unwrap();
        (d, m, hb1, hb2)
    }

    #[test]
    fn hand_traced_fixture() {
        let (d, m, hb1, hb2) = fixture();
        let (t, scene) = separate_hyperblocks(&hb2, &hb1, &m, &d).unwrap();
        assert_eq!(t.separating_attributes, vec![0, 1]);
        // upper sums: HB1 1.0+0.2, HB2 0.2+1.0; tie keeps the first argument
        assert_eq!(t.hb1_id, 0);
        assert!(t.hb1_y_range.0 > t.hb2_y_range.1);
        for p in &scene.polylines {
            let u = m.project(d.point(p.source_index)).unwrap();
            assert!((p.endpoint_projection - u).abs() < 1e-12);
            assert!((p.vertices.last().unwrap()[0] - u).abs() < 1e-12);
        }
    }

    #[test]
    fn single_separating_attribute() {
        let (d, m, mut hb1, mut hb2) = fixture();
        hb1.lower[1] = 0.0;
        hb1.upper[1] = 1.0;
        hb2.lower[1] = 0.0;
        hb2.upper[1] = 1.0;
        let (t, _) = separate_hyperblocks(&hb1, &hb2, &m, &d).unwrap();
        assert_eq!(t.separating_attributes, vec![0]);
        assert_eq!(t.hb1_id, 0);
        assert!(t.hb1_y_range.0 > t.hb2_y_range.1);
        assert_eq!(t.duplicated_attribute_values.len(), 2);
    }

    #[test]
    fn overlap_and_degenerate() {
        let (d, m, hb1, _) = fixture();
        assert!(matches!(
            separate_hyperblocks(&hb1, &hb1, &m, &d),
            Err(GlcError::HyperblocksOverlap)
        ));
        let zero = Hyperblock::from_bounds(vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0], "a", None, Algorithm::Irl, &d).unwrap();
        let high = Hyperblock::from_bounds(vec![0.5, 0.5, 0.5], vec![0.6, 0.6, 0.6], "b", None, Algorithm::Irl, &d).unwrap();
        assert!(separate_hyperblocks(&zero, &high, &m, &d).is_ok());
        let neg = Hyperblock::from_bounds(vec![-0.6, -0.6, -0.6], vec![-0.5, -0.5, -0.5], "b", None, Algorithm::Irl, &d).unwrap();
        assert!(matches!(
            separate_hyperblocks(&zero, &neg, &m, &d),
            Err(GlcError::DegenerateSeparation(_))
        ));
    }
}
