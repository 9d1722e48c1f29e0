//! Self-contained SVG region plots. Output depends only on the inputs.

use serde::{Deserialize, Serialize};
use std::fmt::Write;

use super::{ScanFamily, ScanRow};
use crate::symplectic_core::StabilityClass;

/// A bound curve in scan coordinates, possibly broken into pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSeries {
    pub label: String,
    pub use_g: bool,
    pub segments: Vec<Vec<(f64, f64)>>,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

fn color(c: Option<StabilityClass>) -> &'static str {
    match c {
        Some(StabilityClass::EE) => "#4c9f70",
        Some(StabilityClass::EH) => "#e3a21a",
        Some(StabilityClass::HH) => "#c0392b",
        Some(StabilityClass::CS) => "#7d3c98",
        Some(StabilityClass::Degenerate) => "#7f8c8d",
        None => "#000000",
    }
}

const CURVE_COLORS: [&str; 4] = ["#1f4e99", "#111111", "#1f4e99", "#111111"];

/// Sorted distinct values and the half-width of a cell around each.
fn grid(values: impl Iterator<Item = f64>) -> (Vec<f64>, f64) {
    let mut v: Vec<f64> = values.filter(|x| x.is_finite()).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    let half = if v.len() > 1 { 0.5 * (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64 } else { 0.5 };
    (v, half)
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Class-colored cells for every row, the curves as polylines, axes and a
/// legend in an 800×600 viewBox.
pub fn render_region(rows: &[ScanRow], curves: &[CurveSeries]) -> String {
    let (xs, hx) = grid(rows.iter().map(|r| r.param));
    let (ys, hy) = grid(rows.iter().map(|r| r.e));
    let (x0, x1) = xs.first().zip(xs.last()).map_or((0.0, 1.0), |(a, b)| (a - hx, b + hx));
    let (y0, y1) = ys.first().zip(ys.last()).map_or((0.0, 1.0), |(a, b)| (a - hy, b + hy));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;
    let cw = 2.0 * hx / (x1 - x0) * pw;
    let chh = 2.0 * hy / (y1 - y0) * ph;

    let axis_label = rows
        .first()
        .and_then(|r| r.family.parse::<ScanFamily>().ok())
        .map_or("parameter", |f| f.axis_label());
    let title = rows.first().map_or(String::new(), |r| r.family.clone());

    let mut s = String::new();
    let _ = writeln!(
        s,
        r##"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="13">"##
    );
    let _ = writeln!(s, r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##);
    let _ = writeln!(s, r##"<text x="{:.2}" y="20" text-anchor="middle">{}</text>"##, LEFT + pw / 2.0, esc(&title));
    let _ = writeln!(s, r##"<g id="cells" stroke="none">"##);
    for r in rows {
        if !(r.param.is_finite() && r.e.is_finite()) {
            continue;
        }
        let fill = color(r.overall_class());
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"><title>{} {:.6} e={:.6} {}</title></rect>"##,
            sx(r.param) - cw / 2.0,
            sy(r.e) - chh / 2.0,
            cw,
            chh,
            esc(&r.family),
            r.param,
            r.e,
            esc(&r.class),
        );
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r##"<clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}"/></clipPath>"##);
    let _ = writeln!(s, r##"<g id="curves" fill="none" stroke-width="2" clip-path="url(#plot)">"##);
    for (i, c) in curves.iter().enumerate() {
        let dash = if c.use_g { "" } else { r##" stroke-dasharray="6 4""## };
        for seg in &c.segments {
            let pts: Vec<String> = seg
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            if pts.len() >= 2 {
                let _ = writeln!(s, r##"<polyline points="{}" stroke="{}"{dash}/>"##, pts.join(" "), CURVE_COLORS[i % 4]);
            }
        }
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r##"<g id="axes" stroke="#000000" fill="none">"##);
    let _ = writeln!(s, r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}"/>"##);
    let _ = writeln!(s, "</g>");
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = x0 + t * (x1 - x0);
        let yv = y0 + t * (y1 - y0);
        let _ = writeln!(
            s,
            r##"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="#000000"/><text x="{0:.2}" y="{3:.2}" text-anchor="middle">{4}</text>"##,
            sx(xv),
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0,
            tick(xv, x1 - x0)
        );
        let _ = writeln!(
            s,
            r##"<line x1="{0:.2}" y1="{1:.2}" x2="{2:.2}" y2="{1:.2}" stroke="#000000"/><text x="{3:.2}" y="{4:.2}" text-anchor="end">{5}</text>"##,
            LEFT - 5.0,
            sy(yv),
            LEFT,
            LEFT - 8.0,
            sy(yv) + 4.0,
            tick(yv, y1 - y0)
        );
    }
    let _ = writeln!(s, r##"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"##, LEFT + pw / 2.0, HEIGHT - 15.0, esc(axis_label));
    let _ = writeln!(
        s,
        r##"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">e</text>"##,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    let lx = WIDTH - RIGHT + 15.0;
    let mut ly = TOP + 10.0;
    for c in [StabilityClass::EE, StabilityClass::EH, StabilityClass::HH, StabilityClass::CS, StabilityClass::Degenerate] {
        let _ = writeln!(
            s,
            r##"<rect x="{lx:.2}" y="{:.2}" width="14" height="14" fill="{}"/><text x="{:.2}" y="{:.2}">{}</text>"##,
            ly - 11.0,
            color(Some(c)),
            lx + 20.0,
            ly,
            c.as_str()
        );
        ly += 20.0;
    }
    let _ = writeln!(
        s,
        r##"<rect x="{lx:.2}" y="{:.2}" width="14" height="14" fill="{}"/><text x="{:.2}" y="{ly:.2}">failed</text>"##,
        ly - 11.0,
        color(None),
        lx + 20.0
    );
    ly += 30.0;
    for (i, c) in curves.iter().enumerate() {
        let dash = if c.use_g { "" } else { r##" stroke-dasharray="6 4""## };
        let _ = writeln!(
            s,
            r##"<line x1="{lx:.2}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="{2}" stroke-width="2"{dash}/><text x="{3:.2}" y="{4:.2}" font-size="11">{5}</text>"##,
            ly - 4.0,
            lx + 14.0,
            CURVE_COLORS[i % 4],
            lx + 20.0,
            ly,
            esc(&c.label)
        );
        ly += 18.0;
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64, span: f64) -> String {
    let digits = (-(span / 4.0).log10().floor()).clamp(0.0, 8.0) as usize + 1;
    format!("{v:.digits$}")
}
