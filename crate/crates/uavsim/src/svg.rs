//! Minimal self-contained SVG plots.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub struct Series<'a> {
    pub label: &'a str,
    pub values: &'a [f64],
}

/// Line chart against the 1-based index. Non-finite values and values
/// outside `y_clip` are clamped so one outlier cannot flatten the plot.
pub fn line_plot(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series<'_>],
    threshold: Option<f64>,
    y_clip: Option<(f64, f64)>,
) -> String {
    let n = series.iter().map(|s| s.values.len()).max().unwrap_or(0).max(2);
    let clip = |v: f64| match y_clip {
        Some((lo, hi)) if v.is_nan() => hi.min(lo.max(0.0)),
        Some((lo, hi)) => v.clamp(lo, hi),
        None => v,
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in series
        .iter()
        .flat_map(|s| s.values.iter().map(|&v| clip(v)))
        .chain(threshold)
    {
        if v.is_finite() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo, hi) = (lo - 0.5, hi + 0.5);
    }
    let px = |i: usize| MARGIN + (W - 2.0 * MARGIN) * i as f64 / (n - 1) as f64;
    let py = |v: f64| H - MARGIN - (H - 2.0 * MARGIN) * (v - lo) / (hi - lo);

    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, x_label, y_label, (1.0, n as f64), (lo, hi));
    if let Some(t) = threshold {
        let y = py(t);
        let _ = writeln!(
            out,
            r##"<line x1="{MARGIN}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#888" stroke-dasharray="4 3"/>"##,
            W - MARGIN
        );
    }
    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut points = String::new();
        for (i, &v) in s.values.iter().enumerate() {
            let v = clip(v);
            if v.is_finite() {
                let _ = write!(points, "{:.2},{:.2} ", px(i), py(v));
            }
        }
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
            points.trim_end()
        );
        let ly = MARGIN + 14.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{ly:.0}" fill="{color}" text-anchor="end">{}</text>"#,
            W - MARGIN - 4.0,
            escape(s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn axes(out: &mut String, x_label: &str, y_label: &str, x: (f64, f64), y: (f64, f64)) {
    let (x0, y0, x1, y1) = (MARGIN, H - MARGIN, W - MARGIN, MARGIN);
    let _ = writeln!(
        out,
        r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{x0}" y="{}" text-anchor="middle">{}</text>"#,
        y0 + 16.0,
        tick(x.0)
    );
    let _ = writeln!(
        out,
        r#"<text x="{x1}" y="{}" text-anchor="middle">{}</text>"#,
        y0 + 16.0,
        tick(x.1)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{y0}" text-anchor="end">{}</text>"#,
        x0 - 4.0,
        tick(y.0)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
        x0 - 4.0,
        y1 + 4.0,
        tick(y.1)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        W / 2.0,
        H - 16.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
}

fn tick(v: f64) -> String {
    if v.abs() >= 1e4 || (v != 0.0 && v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// Grid with the flown path from start to end.
pub fn trajectory_plot(
    title: &str,
    cols: usize,
    rows: usize,
    path: &[(usize, usize)],
    start: (usize, usize),
    terminal: (usize, usize),
) -> String {
    let cell = ((W - 2.0 * MARGIN) / cols.max(1) as f64).min((H - 2.0 * MARGIN) / rows.max(1) as f64);
    let cx = |c: usize| MARGIN + cell * (c as f64 + 0.5);
    let cy = |r: usize| H - MARGIN - cell * (r as f64 + 0.5);
    let mut out = String::new();
    header(&mut out, title);
    for r in 0..rows {
        for c in 0..cols {
            let fill = if (c, r) == start {
                "#cde8cd"
            } else if (c, r) == terminal {
                "#f6cccc"
            } else {
                "none"
            };
            let _ = writeln!(
                out,
                r##"<rect x="{:.2}" y="{:.2}" width="{cell:.2}" height="{cell:.2}" fill="{fill}" stroke="#bbb"/>"##,
                cx(c) - cell / 2.0,
                cy(r) - cell / 2.0
            );
        }
    }
    let points: Vec<String> = path
        .iter()
        .map(|&(c, r)| format!("{:.2},{:.2}", cx(c), cy(r)))
        .collect();
    let _ = writeln!(
        out,
        r##"<polyline fill="none" stroke="#1f77b4" stroke-width="3" points="{}"/>"##,
        points.join(" ")
    );
    for &(c, r) in path {
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="4" fill="#1f77b4"/>"##,
            cx(c),
            cy(r)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Heat map of a square field given row-major with `x` fastest, with the
/// marked points circled.
pub fn heatmap(title: &str, resolution: usize, values: &[f64], marked: &[usize]) -> String {
    let side = (H - 2.0 * MARGIN).min(W - 2.0 * MARGIN);
    let px = side / resolution.max(1) as f64;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = String::new();
    header(&mut out, title);
    for (k, &v) in values.iter().enumerate() {
        let (ix, iy) = (k % resolution, k / resolution);
        let t = ((v - lo) / span).clamp(0.0, 1.0);
        let (r, g, b) = ((255.0 * t) as u8, (80.0 + 100.0 * t) as u8, (255.0 * (1.0 - t)) as u8);
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({r},{g},{b})"/>"#,
            MARGIN + px * ix as f64,
            H - MARGIN - px * (iy + 1) as f64,
            px + 0.05,
            px + 0.05
        );
    }
    for &k in marked {
        let (ix, iy) = (k % resolution, k / resolution);
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="5" fill="none" stroke="white" stroke-width="2"/>"#,
            MARGIN + px * (ix as f64 + 0.5),
            H - MARGIN - px * (iy as f64 + 0.5)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}">min {} max {}</text>"#,
        MARGIN + side + 8.0,
        MARGIN + 12.0,
        tick(lo),
        tick(hi)
    );
    out.push_str("</svg>\n");
    out
}
