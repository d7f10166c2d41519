use serde::{Deserialize, Serialize};

use crate::error::{GlcError, Result};
use crate::linear::GlcModel;

/// One n-D point drawn as a chain of 2-D segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub vertices: Vec<[f64; 2]>,
    /// x-coordinate of the last vertex.
    pub endpoint_projection: f64,
    pub mirrored: bool,
    pub source_index: usize,
}

impl Polyline {
    pub fn endpoint(&self) -> [f64; 2] {
        *self.vertices.last().expect("polyline has vertices")
    }

    pub fn with_source(mut self, source_index: usize) -> Self {
        self.source_index = source_index;
        self
    }

    /// The same polyline with every y-coordinate negated.
    pub fn mirror(&self) -> Polyline {
        Polyline {
            vertices: self.vertices.iter().map(|&[x, y]| [x, -y]).collect(),
            mirrored: !self.mirrored,
            ..self.clone()
        }
    }
}

/// GLC-L polyline of `x`: starting at the origin, attribute `i` contributes
/// the segment `(k_i x_i, μ x_i sin Q_i)` with `μ = -1` when mirrored.
///
/// The horizontal component is `sign_i · cos Q_i · x_i = k_i x_i`, so the
/// endpoint lands on `Σ k_i x_i`, the model's projection.
pub fn build_polyline(x: &[f64], m: &GlcModel, mirrored: bool) -> Result<Polyline> {
    let n = m.n_attributes();
    if x.len() != n {
        return Err(GlcError::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let mu = if mirrored { -1.0 } else { 1.0 };
    let mut vertices = Vec::with_capacity(n + 1);
    let (mut px, mut py) = (0.0f64, 0.0f64);
    vertices.push([px, py]);
    for ((&xi, &ki), &qi) in x.iter().zip(m.k()).zip(m.angles()) {
        px += ki * xi;
        py += mu * xi * qi.sin();
        vertices.push([px, py]);
    }
    Ok(Polyline {
        endpoint_projection: px,
        vertices,
        mirrored,
        source_index: 0,
    })
}

/// Inverts [`build_polyline`]: each coordinate is read back from whichever
/// segment component (horizontal or vertical) is larger for its angle.
pub fn reconstruct_point(p: &Polyline, m: &GlcModel) -> Result<Vec<f64>> {
    let n = m.n_attributes();
    if p.vertices.len() != n + 1 {
        return Err(GlcError::DimensionMismatch {
            expected: n + 1,
            got: p.vertices.len(),
        });
    }
    let mu = if p.mirrored { -1.0 } else { 1.0 };
    Ok(p.vertices
        .windows(2)
        .zip(m.k().iter().zip(m.angles()))
        .map(|(w, (&ki, &qi))| {
            let (dx, dy) = (w[1][0] - w[0][0], w[1][1] - w[0][1]);
            let s = qi.sin();
            if ki.abs() >= s {
                dx / ki
            } else {
                mu * dy / s
            }
        })
        .collect())
}

/// Height (y-coordinate) of the unmirrored GLC-L endpoint, `Σ x_i sin Q_i`.
pub fn endpoint_height(x: &[f64], m: &GlcModel) -> f64 {
    x.iter().zip(m.angles()).map(|(xi, qi)| xi * qi.sin()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::ClassRoles;

    fn model(c: Vec<f64>) -> GlcModel {
        GlcModel::from_coefficients(c, 0.0, ClassRoles::new("a", "b")).unwrap()
    }

    #[test]
    fn unit_point_chain() {
        let m = model(vec![1.0, 0.8, 0.5, 0.2]);
        let p = build_polyline(&[1.0; 4], &m, false).unwrap();
        assert_eq!(p.vertices.len(), 5);
        assert_eq!(p.vertices[0], [0.0, 0.0]);
        let sum_cos: f64 = m.angles().iter().map(|q| q.cos()).sum();
        assert!((p.endpoint_projection - sum_cos).abs() < 1e-12);
        let back = reconstruct_point(&p, &m).unwrap();
        assert!(back.iter().all(|v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn flat_chain_with_zero_angles() {
        let m = model(vec![1.0, 1.0, 1.0]);
        let p = build_polyline(&[0.2, 0.3, 0.4], &m, false).unwrap();
        assert!(p.vertices.iter().all(|v| v[1] == 0.0));
        assert!((p.endpoint_projection - 0.9).abs() < 1e-15);
    }

    #[test]
    fn vertical_segment_ignores_value() {
        let m = model(vec![1.0, 0.0]);
        let a = build_polyline(&[0.5, 0.1], &m, false).unwrap();
        let b = build_polyline(&[0.5, 0.9], &m, false).unwrap();
        assert_eq!(a.endpoint_projection, b.endpoint_projection);
        assert!((reconstruct_point(&b, &m).unwrap()[1] - 0.9).abs() < 1e-12);
    }

    #[test]
    fn negative_coefficient_points_left() {
        let m = model(vec![-1.0, 0.5]);
        let p = build_polyline(&[0.4, 0.6], &m, true).unwrap();
        assert!(p.vertices[1][0] < 0.0);
        assert!((p.endpoint_projection - m.project(&[0.4, 0.6]).unwrap()).abs() < 1e-12);
        assert!(p.endpoint()[1] < 0.0);
        let back = reconstruct_point(&p, &m).unwrap();
        assert!((back[0] - 0.4).abs() < 1e-12 && (back[1] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn zeros_round_trip() {
        let m = model(vec![0.3, -0.7, 0.9]);
        let p = build_polyline(&[0.0; 3], &m, false).unwrap();
        assert_eq!(reconstruct_point(&p, &m).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn mismatched_lengths() {
        let m = model(vec![1.0, 1.0]);
        assert!(build_polyline(&[1.0], &m, false).is_err());
        let p = build_polyline(&[1.0, 1.0], &m, false).unwrap();
        assert!(reconstruct_point(&p, &model(vec![1.0])).is_err());
    }
}
