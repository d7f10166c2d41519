//! Dynamic Scaffolding Coordinates.
//!
//! DSC1 turns every attribute into a scaffold `x_t (cos θ_t, sin θ_t)`;
//! DSC2 turns every attribute pair into the scaffold `(x_a, x_b)`. Scaffolds
//! are chained head to tail and the tail of the first one (the origin) is
//! dropped, so a polyline starts at the tip of its first scaffold.

use serde::{Deserialize, Serialize};

use crate::error::{GlcError, Result};
use crate::geometry::glcl::Polyline;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DscMode {
    Dsc1,
    Dsc2,
}

pub const DSC1_FIRST_ANGLE_DEG: f64 = 80.0;
pub const DSC1_OTHER_ANGLE_DEG: f64 = 45.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DscConfig {
    pub mode: DscMode,
    /// Permutation of attribute indices; scaffolds are chained in this order.
    pub attribute_order: Vec<usize>,
    /// DSC1 angle of each attribute in radians, indexed by attribute.
    pub dsc1_angles: Vec<f64>,
    /// DSC2 attribute pairs in chaining order.
    pub dsc2_pairing: Vec<(usize, usize)>,
}

impl DscConfig {
    /// DSC1 over `order`: the first attribute in the order is drawn at 80°,
    /// the others at 45°.
    pub fn dsc1(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut angles = vec![DSC1_OTHER_ANGLE_DEG.to_radians(); n];
        if let Some(&first) = order.first() {
            if first < n {
                angles[first] = DSC1_FIRST_ANGLE_DEG.to_radians();
            }
        }
        let cfg = DscConfig {
            mode: DscMode::Dsc1,
            attribute_order: order,
            dsc1_angles: angles,
            dsc2_pairing: Vec::new(),
        };
        cfg.validate(n)?;
        Ok(cfg)
    }

    /// DSC2 pairing consecutive attributes of `order`; with an odd count the
    /// last attribute is paired with itself.
    pub fn dsc2(order: Vec<usize>) -> Result<Self> {
        let pairing = order
            .chunks(2)
            .map(|c| (c[0], *c.get(1).unwrap_or(&c[0])))
            .collect();
        let n = order.len();
        let cfg = DscConfig {
            mode: DscMode::Dsc2,
            attribute_order: order,
            dsc1_angles: Vec::new(),
            dsc2_pairing: pairing,
        };
        cfg.validate(n)?;
        Ok(cfg)
    }

    pub fn identity(mode: DscMode, n: usize) -> Self {
        let order = (0..n).collect();
        match mode {
            DscMode::Dsc1 => DscConfig::dsc1(order),
            DscMode::Dsc2 => DscConfig::dsc2(order),
        }
        .expect("identity order is valid")
    }

    pub fn with_angle(mut self, attribute: usize, radians: f64) -> Result<Self> {
        if attribute >= self.dsc1_angles.len() {
            return Err(GlcError::InvalidParameter(format!(
                "no DSC1 angle for attribute {attribute}"
            )));
        }
        self.dsc1_angles[attribute] = radians;
        Ok(self)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.attribute_order.len() != n {
            return Err(GlcError::DimensionMismatch {
                expected: n,
                got: self.attribute_order.len(),
            });
        }
        let mut seen = vec![false; n];
        for &a in &self.attribute_order {
            if a >= n || std::mem::replace(&mut seen[a], true) {
                return Err(GlcError::InvalidParameter(
                    "attribute_order must be a permutation".into(),
                ));
            }
        }
        match self.mode {
            DscMode::Dsc1 => {
                if self.dsc1_angles.len() != n || self.dsc1_angles.iter().any(|a| !a.is_finite()) {
                    return Err(GlcError::InvalidParameter(format!(
                        "DSC1 needs {n} finite angles"
                    )));
                }
            }
            DscMode::Dsc2 => {
                if self.dsc2_pairing.len() != n.div_ceil(2) {
                    return Err(GlcError::InvalidParameter(format!(
                        "DSC2 needs {} pairs for {n} attributes",
                        n.div_ceil(2)
                    )));
                }
                let mut count = vec![0usize; n];
                for (i, &(a, b)) in self.dsc2_pairing.iter().enumerate() {
                    if a >= n || b >= n {
                        return Err(GlcError::InvalidParameter("pair index out of range".into()));
                    }
                    count[a] += 1;
                    if a != b {
                        count[b] += 1;
                    } else if n.is_multiple_of(2) || i + 1 != self.dsc2_pairing.len() {
                        return Err(GlcError::InvalidParameter(
                            "only the last pair of an odd attribute count may repeat an attribute"
                                .into(),
                        ));
                    }
                }
                if count.iter().any(|&c| c != 1) {
                    return Err(GlcError::InvalidParameter(
                        "DSC2 pairing must cover each attribute exactly once".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

pub fn dsc_polyline(x: &[f64], cfg: &DscConfig) -> Result<Polyline> {
    cfg.validate(x.len())?;
    let steps: Vec<[f64; 2]> = match cfg.mode {
        DscMode::Dsc1 => cfg
            .attribute_order
            .iter()
            .map(|&a| {
                let t = cfg.dsc1_angles[a];
                [x[a] * t.cos(), x[a] * t.sin()]
            })
            .collect(),
        DscMode::Dsc2 => cfg.dsc2_pairing.iter().map(|&(a, b)| [x[a], x[b]]).collect(),
    };
    let mut vertices = Vec::with_capacity(steps.len());
    let mut at = [0.0f64, 0.0f64];
    for s in steps {
        at = [at[0] + s[0], at[1] + s[1]];
        vertices.push(at);
    }
    Ok(Polyline {
        endpoint_projection: at[0],
        vertices,
        mirrored: false,
        source_index: 0,
    })
}

/// Inverts [`dsc_polyline`] by successive differences.
pub fn dsc_reconstruct(p: &Polyline, cfg: &DscConfig) -> Result<Vec<f64>> {
    let n = cfg.attribute_order.len();
    cfg.validate(n)?;
    let expected = match cfg.mode {
        DscMode::Dsc1 => n,
        DscMode::Dsc2 => cfg.dsc2_pairing.len(),
    };
    if p.vertices.len() != expected {
        return Err(GlcError::DimensionMismatch {
            expected,
            got: p.vertices.len(),
        });
    }
    let mut prev = [0.0, 0.0];
    let steps: Vec<[f64; 2]> = p
        .vertices
        .iter()
        .map(|v| {
            let s = [v[0] - prev[0], v[1] - prev[1]];
            prev = *v;
            s
        })
        .collect();
    let mut x = vec![0.0; n];
    match cfg.mode {
        DscMode::Dsc1 => {
            for (&a, s) in cfg.attribute_order.iter().zip(&steps) {
                let (c, sn) = (cfg.dsc1_angles[a].cos(), cfg.dsc1_angles[a].sin());
                x[a] = if c.abs() >= sn.abs() { s[0] / c } else { s[1] / sn };
            }
        }
        DscMode::Dsc2 => {
            for (&(a, b), s) in cfg.dsc2_pairing.iter().zip(&steps) {
                x[a] = s[0];
                x[b] = s[1];
            }
        }
    }
    Ok(x)
}
