use std::fmt::Write;

use super::bezier::BezierStroke;

const PALETTE: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// SVG of fitted strokes in pixel coordinates. Each `<path>` carries its
/// control points in a `data-control` attribute.
pub fn strokes_svg(width: usize, height: usize, strokes: &[BezierStroke]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="-0.5 -0.5 {w} {h}">"#,
        w = width,
        h = height
    );
    for (i, s) in strokes.iter().enumerate() {
        let [a, b, c, d] = s.control;
        let _ = writeln!(
            out,
            r#"  <path d="M {:.3} {:.3} C {:.3} {:.3} {:.3} {:.3} {:.3} {:.3}" data-control="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3} {:.3},{:.3}" fill="none" stroke="{}" stroke-width="0.6"/>"#,
            a.x, a.y, b.x, b.y, c.x, c.y, d.x, d.y,
            a.x, a.y, b.x, b.y, c.x, c.y, d.x, d.y,
            PALETTE[i % PALETTE.len()]
        );
    }
    out.push_str("</svg>\n");
    out
}
