use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{GlcError, Result};
use crate::geometry::build_scene;
use crate::hyperblock::{analytics_for, Algorithm, HbAnalytics, Hyperblock};
use crate::linear::GlcModel;

/// Axis-aligned rectangle in scene coordinates. Corners may come in any
/// order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn normalized(&self) -> Rect {
        Rect {
            x0: self.x0.min(self.x1),
            y0: self.y0.min(self.y1),
            x1: self.x0.max(self.x1),
            y1: self.y0.max(self.y1),
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let r = self.normalized();
        r.x0 <= p[0] && p[0] <= r.x1 && r.y0 <= p[1] && p[1] <= r.y1
    }
}

impl std::str::FromStr for Rect {
    type Err = GlcError;

    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| GlcError::InvalidParameter(format!("bad rectangle {s:?}, want x0,y0,x1,y1")))?;
        match v.as_slice() {
            [x0, y0, x1, y1] => Ok(Rect::new(*x0, *y0, *x1, *y1)),
            _ => Err(GlcError::InvalidParameter(format!(
                "bad rectangle {s:?}, want x0,y0,x1,y1"
            ))),
        }
    }
}

/// Interactive rule: the points whose GLC-L endpoints fall inside `rect`
/// define the block as their envelope, labeled with their majority class
/// (class 1 on a tie). Analytics count every training point inside the
/// block, selected or not.
pub fn rule_from_selection(d: &Dataset, m: &GlcModel, rect: Rect) -> Result<(Hyperblock, HbAnalytics)> {
    let r = rect.normalized();
    if !(r.x1 > r.x0 && r.y1 > r.y0) || [r.x0, r.x1, r.y0, r.y1].iter().any(|v| !v.is_finite()) {
        return Err(GlcError::InvalidParameter(
            "selection rectangle must have positive area".into(),
        ));
    }
    let scene = build_scene(d, m, None)?;
    let selected: Vec<usize> = scene
        .polylines
        .iter()
        .filter(|p| r.contains(*p.vertices.last().expect("non-empty polyline")))
        .map(|p| p.source_index)
        .collect();
    if selected.is_empty() {
        return Err(GlcError::EmptySelection);
    }
    let roles = m.roles();
    let c1 = selected.iter().filter(|&&i| d.label(i) == roles.class1).count();
    let c2 = selected.iter().filter(|&&i| d.label(i) == roles.class2).count();
    let class = if c2 > c1 { &roles.class2 } else { &roles.class1 };
    let block = Hyperblock::envelope_of(d, &selected, class.clone(), None, Algorithm::Irl);
    let analytics = analytics_for(&block, 0, 1, d);
    Ok((block, analytics))
}
