use std::fmt::Write;

use crate::geometry::scene::Scene;

const MARGIN: f64 = 20.0;
const PALETTE: [&str; 6] = ["#7d3c98", "#229954", "#2471a3", "#ca6f1e", "#c0392b", "#566573"];
const THRESHOLD_COLOR: &str = "#1e8449";
const BOUNDS_COLOR: &str = "#d4ac0d";

fn role_color(role: &str) -> &'static str {
    let idx = role
        .strip_prefix("class")
        .and_then(|s| s.parse::<usize>().ok())
        .unwrap_or(1)
        .saturating_sub(1);
    PALETTE[idx % PALETTE.len()]
}

struct Frame {
    x0: f64,
    y1: f64,
    sx: f64,
    sy: f64,
}

impl Frame {
    fn new(s: &Scene, w: f64, h: f64) -> Self {
        let (x0, x1) = s.x_range();
        let (y0, y1) = s.y_range();
        let span = |a: f64, b: f64| if b > a { b - a } else { 1.0 };
        Frame {
            x0,
            y1,
            sx: (w - 2.0 * MARGIN).max(1.0) / span(x0, x1),
            sy: (h - 2.0 * MARGIN).max(1.0) / span(y0, y1),
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) * self.sx
    }

    fn py(&self, y: f64) -> f64 {
        MARGIN + (self.y1 - y) * self.sy
    }
}

/// Renders a scene as a standalone SVG document of `w × h` pixels.
///
/// Every polyline becomes one `<path>`; axes, the threshold and the
/// worst-case bounds are `<line>` elements, the last two dashed. The output
/// depends only on the scene and the size.
pub fn render_svg(s: &Scene, w: u32, h: u32) -> String {
    let (wf, hf) = (w.max(1) as f64, h.max(1) as f64);
    let f = Frame::new(s, wf, hf);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);

    let (ax0, ax1) = (f.px(s.x_range().0), f.px(s.x_range().1));
    let (ay0, ay1) = (f.py(s.y_range().0), f.py(s.y_range().1));
    let _ = writeln!(out, r#"<g class="axes" stroke="black" stroke-width="1">"#);
    let _ = writeln!(
        out,
        r#"<line x1="{ax0:.2}" y1="{:.2}" x2="{ax1:.2}" y2="{:.2}"/>"#,
        f.py(0.0),
        f.py(0.0)
    );
    let _ = writeln!(
        out,
        r#"<line x1="{:.2}" y1="{ay0:.2}" x2="{:.2}" y2="{ay1:.2}"/>"#,
        f.px(0.0),
        f.px(0.0)
    );
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, r#"<g class="polylines" fill="none" stroke-width="0.8" stroke-opacity="0.6">"#);
    for p in &s.polylines {
        let role = s.legend.get(&p.class).map(String::as_str).unwrap_or("class1");
        let mut d = String::new();
        for (i, v) in p.vertices.iter().enumerate() {
            let _ = write!(
                d,
                "{}{:.2} {:.2}",
                if i == 0 { "M" } else { " L" },
                f.px(v[0]),
                f.py(v[1])
            );
        }
        let _ = writeln!(
            out,
            r#"<path class="{role}" data-index="{}" stroke="{}" d="{d}"/>"#,
            p.source_index,
            role_color(role)
        );
    }
    let _ = writeln!(out, "</g>");

    let vline = |out: &mut String, class: &str, color: &str, u: f64| {
        let _ = writeln!(
            out,
            r#"<line class="{class}" x1="{x:.2}" y1="{ay0:.2}" x2="{x:.2}" y2="{ay1:.2}" stroke="{color}" stroke-width="1.5" stroke-dasharray="6 4"/>"#,
            x = f.px(u)
        );
    };
    if let Some(t) = s.threshold {
        vline(&mut out, "discrimination-line", THRESHOLD_COLOR, t);
    }
    if let Some((lo, hi)) = s.bounds {
        vline(&mut out, "worst-case-bound", BOUNDS_COLOR, lo);
        vline(&mut out, "worst-case-bound", BOUNDS_COLOR, hi);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Dataset;
    use crate::geometry::scene::{build_scene, SceneMode};
    use crate::linear::{ClassRoles, GlcModel};

    #[test]
    fn empty_scene_has_axes_only() {
        let svg = render_svg(&Scene::empty(SceneMode::Glcl), 200, 100);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<path").count(), 0);
        assert_eq!(svg.matches("<line").count(), 2);
    }

    #[test]
    fn path_per_polyline_and_deterministic() {
        let d = Dataset::new(
            "t",
            vec!["a".into(), "b".into()],
            vec![vec![0.1, 0.3], vec![0.9, 0.7]],
            vec!["p".into(), "q".into()],
        )
        .unwrap();
        let m = GlcModel::from_coefficients(vec![1.0, -0.5], 0.1, ClassRoles::new("p", "q")).unwrap();
        let s = build_scene(&d, &m, Some((0.0, 0.3))).unwrap();
        let a = render_svg(&s, 640, 480);
        assert_eq!(a.matches("<path").count(), 2);
        assert_eq!(a.matches("stroke-dasharray").count(), 3);
        assert_eq!(a, render_svg(&s.clone(), 640, 480));
    }
}
