use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{GlcError, Result};
use crate::geometry::dsc::{dsc_polyline, DscConfig, DscMode};
use crate::geometry::glcl::{build_polyline, Polyline};
use crate::linear::{GlcModel, Role};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SceneMode {
    Glcl,
    Dsc1,
    Dsc2,
    Separation,
}

impl From<DscMode> for SceneMode {
    fn from(m: DscMode) -> Self {
        match m {
            DscMode::Dsc1 => SceneMode::Dsc1,
            DscMode::Dsc2 => SceneMode::Dsc2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenePolyline {
    pub vertices: Vec<[f64; 2]>,
    pub class: String,
    pub mirrored: bool,
    pub endpoint_projection: f64,
    pub source_index: usize,
}

impl ScenePolyline {
    fn new(p: Polyline, class: String) -> Self {
        ScenePolyline {
            vertices: p.vertices,
            class,
            mirrored: p.mirrored,
            endpoint_projection: p.endpoint_projection,
            source_index: p.source_index,
        }
    }
}

/// Everything needed to draw one dataset.
///
/// `legend` maps each class label to a color role (`class1`, `class2`, ...);
/// renderers pick the actual colors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub mode: SceneMode,
    pub polylines: Vec<ScenePolyline>,
    pub threshold: Option<f64>,
    pub bounds: Option<(f64, f64)>,
    pub axis_range: (f64, f64),
    pub legend: BTreeMap<String, String>,
}

impl Scene {
    pub fn empty(mode: SceneMode) -> Self {
        Scene {
            mode,
            polylines: Vec::new(),
            threshold: None,
            bounds: None,
            axis_range: (0.0, 1.0),
            legend: BTreeMap::new(),
        }
    }

    pub(crate) fn assemble(
        mode: SceneMode,
        polylines: Vec<ScenePolyline>,
        threshold: Option<f64>,
        bounds: Option<(f64, f64)>,
        legend: BTreeMap<String, String>,
    ) -> Self {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let extras = threshold
            .into_iter()
            .chain(bounds.into_iter().flat_map(|(a, b)| [a, b]));
        for u in polylines.iter().map(|p| p.endpoint_projection).chain(extras) {
            lo = lo.min(u);
            hi = hi.max(u);
        }
        let axis_range = if lo.is_finite() { (lo, hi) } else { (0.0, 1.0) };
        Scene {
            mode,
            polylines,
            threshold,
            bounds,
            axis_range,
            legend,
        }
    }

    /// Smallest and largest vertex y over all polylines, including 0.
    pub fn y_range(&self) -> (f64, f64) {
        self.polylines
            .iter()
            .flat_map(|p| p.vertices.iter().map(|v| v[1]))
            .fold((0.0f64, 0.0f64), |(lo, hi), y| (lo.min(y), hi.max(y)))
    }

    /// Smallest and largest vertex x over all polylines and vertical lines.
    pub fn x_range(&self) -> (f64, f64) {
        let mut r = self.axis_range;
        for v in self.polylines.iter().flat_map(|p| &p.vertices) {
            r.0 = r.0.min(v[0]);
            r.1 = r.1.max(v[0]);
        }
        (r.0.min(0.0), r.1.max(0.0))
    }
}

fn role_legend(m: &GlcModel) -> BTreeMap<String, String> {
    BTreeMap::from([
        (m.roles().class1.clone(), "class1".to_string()),
        (m.roles().class2.clone(), "class2".to_string()),
    ])
}

/// GLC-L scene: class-1 polylines above the axis, class-2 polylines mirrored
/// below it, the threshold as a vertical line and optional worst-case bounds.
pub fn build_scene(d: &Dataset, m: &GlcModel, bounds: Option<(f64, f64)>) -> Result<Scene> {
    let roles: Vec<Role> = d
        .labels()
        .iter()
        .map(|l| {
            m.roles()
                .role_of(l)
                .ok_or_else(|| GlcError::InvalidParameter(format!("label {l:?} has no class role")))
        })
        .collect::<Result<_>>()?;
    let polylines = d
        .points()
        .par_iter()
        .zip(roles.par_iter())
        .enumerate()
        .map(|(i, (x, &role))| {
            let p = build_polyline(x, m, role == Role::Class2)?.with_source(i);
            Ok(ScenePolyline::new(p, d.label(i).to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Scene::assemble(
        SceneMode::Glcl,
        polylines,
        Some(m.threshold()),
        bounds,
        role_legend(m),
    ))
}

/// DSC1 or DSC2 scene. Nothing is mirrored and there is no threshold; color
/// roles follow the sorted class labels.
pub fn dsc_scene(d: &Dataset, cfg: &DscConfig) -> Result<Scene> {
    cfg.validate(d.n_attributes())?;
    let polylines = d
        .points()
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let p = dsc_polyline(x, cfg)?.with_source(i);
            Ok(ScenePolyline::new(p, d.label(i).to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let legend = d
        .classes()
        .into_iter()
        .enumerate()
        .map(|(i, c)| (c, format!("class{}", i + 1)))
        .collect();
    Ok(Scene::assemble(cfg.mode.into(), polylines, None, None, legend))
}

pub fn scene_to_json(s: &Scene) -> Result<String> {
    Ok(serde_json::to_string_pretty(s)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::ClassRoles;

    fn toy() -> (Dataset, GlcModel) {
        let d = Dataset::new(
            "t",
            vec!["a".into(), "b".into()],
            vec![vec![0.1, 0.3], vec![0.9, 0.7]],
            vec!["p".into(), "q".into()],
        )
        .unwrap();
        let m = GlcModel::from_coefficients(vec![1.0, 0.5], 0.6, ClassRoles::new("p", "q")).unwrap();
        (d, m)
    }

    #[test]
    fn two_point_scene() {
        let (d, m) = toy();
        let s = build_scene(&d, &m, Some((0.2, 0.8))).unwrap();
        assert_eq!(s.polylines.len(), 2);
        assert!(!s.polylines[0].mirrored && s.polylines[1].mirrored);
        assert!(s.polylines[1].vertices.iter().all(|v| v[1] <= 0.0));
        assert_eq!(s.threshold, Some(0.6));
        for p in &s.polylines {
            assert!(p.endpoint_projection >= s.axis_range.0 && p.endpoint_projection <= s.axis_range.1);
        }
        let json = scene_to_json(&s).unwrap();
        assert!(json.contains("\"endpoint_projection\""));
    }

    #[test]
    fn foreign_label_rejected() {
        let (d, _) = toy();
        let m = GlcModel::from_coefficients(vec![1.0, 0.5], 0.6, ClassRoles::new("p", "z")).unwrap();
        assert!(build_scene(&d, &m, None).is_err());
    }

    #[test]
    fn dsc_scene_legend() {
        let (d, _) = toy();
        let s = dsc_scene(&d, &DscConfig::identity(DscMode::Dsc2, 2)).unwrap();
        assert_eq!(s.mode, SceneMode::Dsc2);
        assert_eq!(s.legend["q"], "class2");
        assert!(s.threshold.is_none());
    }
}
