//! Minimal standalone SVG emitters: heatmap, step histogram, scatter.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 70.0;

const PALETTE: [&str; 6] = ["#0097a7", "#d32f2f", "#7b1fa2", "#388e3c", "#f57c00", "#455a64"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, x_label: &str, y_label: &str) {
    let (x0, y0, x1, y1) = (MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, MARGIN);
    let _ = writeln!(
        out,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 20.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
}

/// Linear blue→yellow ramp for `t` in `[0, 1]`.
fn ramp(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        lerp(68.0, 253.0),
        lerp(1.0, 231.0),
        lerp(84.0, 37.0)
    )
}

/// Grid of cells; `None` cells are drawn hatched grey. Rows run bottom-up.
pub fn heatmap(
    title: &str,
    x_label: &str,
    y_label: &str,
    x_ticks: &[String],
    y_ticks: &[String],
    values: &[Vec<Option<f64>>],
) -> String {
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, x_label, y_label);
    let finite: Vec<f64> = values
        .iter()
        .flatten()
        .flatten()
        .copied()
        .filter(|v| v.is_finite())
        .collect();
    let lo = finite.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let cols = x_ticks.len().max(1) as f64;
    let rows = y_ticks.len().max(1) as f64;
    let cw = (WIDTH - 2.0 * MARGIN) / cols;
    let ch = (HEIGHT - 2.0 * MARGIN) / rows;
    for (r, row) in values.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            let x = MARGIN + c as f64 * cw;
            let y = HEIGHT - MARGIN - (r as f64 + 1.0) * ch;
            let (fill, text) = match v {
                Some(v) if v.is_finite() => (ramp((v - lo) / span), format!("{v:.4}")),
                _ => ("#cccccc".to_string(), "n/a".to_string()),
            };
            let _ = writeln!(
                out,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{cw:.2}" height="{ch:.2}" fill="{fill}" stroke="white"/>"#
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="10">{text}</text>"#,
                x + cw / 2.0,
                y + ch / 2.0 + 4.0
            );
        }
    }
    for (c, t) in x_ticks.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN + (c as f64 + 0.5) * cw,
            HEIGHT - MARGIN + 16.0,
            escape(t)
        );
    }
    for (r, t) in y_ticks.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN - 6.0,
            HEIGHT - MARGIN - (r as f64 + 0.5) * ch + 4.0,
            escape(t)
        );
    }
    out.push_str("</svg>\n");
    out
}

pub struct Series<'a> {
    pub name: &'a str,
    /// `(left edge, value)` per bin; the last bin closes at `right_edge`.
    pub bins: Vec<(f64, f64)>,
    pub right_edge: f64,
}

/// Overlaid step histograms sharing one set of axes.
pub fn step_histogram(title: &str, x_label: &str, y_label: &str, series: &[Series<'_>]) -> String {
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, x_label, y_label);
    let xs = series
        .iter()
        .flat_map(|s| s.bins.iter().map(|b| b.0).chain(std::iter::once(s.right_edge)));
    let (x_lo, x_hi) = bounds(xs);
    let (y_lo, y_hi) = bounds(series.iter().flat_map(|s| s.bins.iter().map(|b| b.1)));
    let sx = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut path = String::new();
        for (j, &(edge, v)) in s.bins.iter().enumerate() {
            let next = s.bins.get(j + 1).map_or(s.right_edge, |b| b.0);
            let cmd = if j == 0 { 'M' } else { 'L' };
            let _ = write!(
                path,
                "{cmd}{:.2},{:.2} L{:.2},{:.2} ",
                sx(edge),
                sy(v),
                sx(next),
                sy(v)
            );
        }
        let _ = writeln!(
            out,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            path.trim_end()
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" fill="{color}">{}</text>"#,
            WIDTH - MARGIN - 150.0,
            MARGIN + 16.0 * (i as f64 + 1.0),
            escape(s.name)
        );
    }
    tick_labels(&mut out, x_lo, x_hi, y_lo, y_hi);
    out.push_str("</svg>\n");
    out
}

/// Scatter of 2-D points coloured by class id.
pub fn scatter(title: &str, x_label: &str, y_label: &str, points: &[[f64; 2]], classes: &[u8]) -> String {
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, x_label, y_label);
    let (x_lo, x_hi) = bounds(points.iter().map(|p| p[0]));
    let (y_lo, y_hi) = bounds(points.iter().map(|p| p[1]));
    let sx = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);
    for (p, &c) in points.iter().zip(classes) {
        let color = PALETTE[c as usize % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="1.8" fill="{color}" fill-opacity="0.7"/>"#,
            sx(p[0]),
            sy(p[1])
        );
    }
    tick_labels(&mut out, x_lo, x_hi, y_lo, y_hi);
    out.push_str("</svg>\n");
    out
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn tick_labels(out: &mut String, x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) {
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="10">{:.3}</text>"#,
            MARGIN + t * (WIDTH - 2.0 * MARGIN),
            HEIGHT - MARGIN + 14.0,
            x_lo + t * (x_hi - x_lo)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="10">{:.3}</text>"#,
            MARGIN - 4.0,
            HEIGHT - MARGIN - t * (HEIGHT - 2.0 * MARGIN) + 4.0,
            y_lo + t * (y_hi - y_lo)
        );
    }
}
