//! Standalone log-log SVG convergence plots.

use std::fmt::Write;

pub struct Series {
    pub label: String,
    /// `(h, error)` pairs; non-positive values cannot be drawn.
    pub points: Vec<(f64, f64)>,
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub fn convergence_svg(series: &[Series]) -> Result<String, String> {
    if series.is_empty() {
        return Err("no convergence data to plot".into());
    }
    for s in series {
        if s.points.len() < 3 {
            return Err(format!("series `{}` has {} points; at least 3 are needed", s.label, s.points.len()));
        }
        if s.points.iter().any(|&(h, e)| !(h > 0.0 && e > 0.0)) {
            return Err(format!("series `{}` has non-positive values", s.label));
        }
    }
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(h, e) in all {
        x0 = x0.min(h.log10());
        x1 = x1.max(h.log10());
        y0 = y0.min(e.log10());
        y1 = y1.max(e.log10());
    }
    let (x0, x1) = (x0.floor(), x1.ceil().max(x0.floor() + 1.0));
    // The reference line spans the x range, so widen y to fit it.
    let first = &series[0].points;
    let (hr, er) = first[first.len() - 1];
    let reference = |lx: f64| er.log10() + 2.0 * (lx - hr.log10());
    y0 = y0.min(reference(x0));
    y1 = y1.max(reference(x1));
    let (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    let px = |lx: f64| MARGIN + (lx - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let py = |ly: f64| H - MARGIN - (ly - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    );
    for d in x0 as i32..=x1 as i32 {
        let x = px(d as f64);
        let _ = writeln!(svg, r##"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{MARGIN}" stroke="#ddd"/>"##, H - MARGIN);
        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{}" text-anchor="middle">1e{d}</text>"#, H - MARGIN + 18.0);
    }
    for d in y0 as i32..=y1 as i32 {
        let y = py(d as f64);
        let _ = writeln!(svg, r##"<line x1="{MARGIN}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/>"##, W - MARGIN);
        let _ = writeln!(svg, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{d}</text>"#, MARGIN - 6.0, y + 4.0);
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">h</text>"#, W / 2.0, H - 15.0);
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">error</text>"#,
        H / 2.0,
        H / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="6 4"/>"#,
        px(x0),
        py(reference(x0)),
        px(x1),
        py(reference(x1))
    );
    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(h, e)| format!("{:.2},{:.2}", px(h.log10()), py(e.log10())))
            .collect();
        let _ = writeln!(svg, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, pts.join(" "));
        for &(h, e) in &s.points {
            let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, px(h.log10()), py(e.log10()));
        }
        let ly = MARGIN + 16.0 + 16.0 * k as f64;
        let _ = writeln!(svg, r#"<text x="{}" y="{ly}" fill="{color}">{}</text>"#, MARGIN + 10.0, escape(&s.label));
    }
    let ly = MARGIN + 16.0 + 16.0 * series.len() as f64;
    let _ = writeln!(svg, r#"<text x="{}" y="{ly}" fill="gray">slope 2</text>"#, MARGIN + 10.0);
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
