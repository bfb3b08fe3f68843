use std::fmt::Write as _;

use super::experiment::AggregateRow;
use crate::reference::rdf_inverse_saturating;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 56.0;
const D_MAX: f64 = 0.5;

fn to_px(rate: f64, d: f64) -> (f64, f64) {
    let x = MARGIN + rate.clamp(0.0, 1.0) * (WIDTH - 2.0 * MARGIN);
    let y = HEIGHT - MARGIN - (d / D_MAX).clamp(0.0, 1.0) * (HEIGHT - 2.0 * MARGIN);
    (x, y)
}

/// Distortion-vs-rate SVG: measured means with standard-error bars over the
/// rate-distortion curve for source bias `p`.
pub fn svg_plot(p: f64, rows: &[AggregateRow]) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let (x0, y0) = to_px(0.0, 0.0);
    let (x1, y1) = to_px(1.0, D_MAX);
    let _ = writeln!(
        svg,
        r#"<path d="M{x0:.1},{y1:.1} L{x0:.1},{y0:.1} L{x1:.1},{y0:.1}" stroke="black" fill="none"/>"#
    );
    for i in 0..=5 {
        let r = i as f64 * 0.2;
        let (x, y) = to_px(r, 0.0);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{r:.1}</text>"#,
            y + 16.0
        );
        let d = i as f64 * 0.1;
        let (x, y) = to_px(0.0, d);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{d:.1}</text>"#,
            x - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">R</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">D</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    let mut curve = String::new();
    for i in 0..=200 {
        let r = i as f64 / 200.0;
        if let Ok(d) = rdf_inverse_saturating(p, r) {
            let (x, y) = to_px(r, d);
            let _ = write!(
                curve,
                "{}{x:.1},{y:.1} ",
                if curve.is_empty() { "M" } else { "L" }
            );
        }
    }
    let _ = writeln!(
        svg,
        r#"<path d="{}" stroke="gray" stroke-dasharray="4 3" fill="none"/>"#,
        curve.trim_end()
    );

    let mut points: Vec<&AggregateRow> = rows.iter().filter(|r| r.mean_d.is_finite()).collect();
    points.sort_by(|a, b| a.rate.total_cmp(&b.rate));
    let mut line = String::new();
    for row in &points {
        let (x, y) = to_px(row.rate, row.mean_d);
        let _ = write!(
            line,
            "{}{x:.1},{y:.1} ",
            if line.is_empty() { "M" } else { "L" }
        );
        let (_, lo) = to_px(row.rate, row.mean_d - row.stderr_d);
        let (_, hi) = to_px(row.rate, row.mean_d + row.stderr_d);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.1}" y1="{lo:.1}" x2="{x:.1}" y2="{hi:.1}" stroke="steelblue"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<circle cx="{x:.1}" cy="{y:.1}" r="3" fill="steelblue"/>"#
        );
    }
    if !line.is_empty() {
        let _ = writeln!(
            svg,
            r#"<path d="{}" stroke="steelblue" fill="none"/>"#,
            line.trim_end()
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}">p = {p}: measured (blue), rate-distortion bound (dashed)</text>"#,
        MARGIN,
        MARGIN - 20.0
    );
    svg.push_str("</svg>\n");
    svg
}
