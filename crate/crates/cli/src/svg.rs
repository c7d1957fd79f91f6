//! Minimal line-and-marker plot.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;

pub struct Series<'a> {
    pub points: &'a [(f64, f64)],
    pub line: bool,
    pub color: &'a str,
    pub label: &'a str,
}

/// Renders the series on shared axes. The y axis spans `[0, 1]`.
pub fn plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let (lo, hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let (lo, hi) = if lo < hi { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
    let px = |x: f64| MARGIN + (x - lo) / (hi - lo) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - y.clamp(0.0, 1.0) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
    let (x0, x1, y0, y1) = (px(lo), px(hi), py(0.0), py(1.0));
    let _ = writeln!(out, r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" stroke="black" fill="none"/>"#);
    for k in 0..=5 {
        let t = k as f64 / 5.0;
        let (gx, gy) = (lo + t * (hi - lo), py(t));
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{gx:.3}</text>"#, px(gx), y0 + 18.0);
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{t:.1}</text>"#, x0 - 6.0, gy + 4.0);
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 12.0, escape(x_label));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        if s.line && s.points.len() > 1 {
            let path: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            let _ = writeln!(out, r#"<polyline points="{}" stroke="{}" fill="none" stroke-width="1.5"/>"#, path.join(" "), s.color);
        } else {
            for &(x, y) in s.points {
                let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#, px(x), py(y), s.color);
            }
        }
        let ly = MARGIN + 16.0 * i as f64;
        let _ = writeln!(out, r#"<rect x="{}" y="{}" width="10" height="10" fill="{}"/>"#, WIDTH - 170.0, ly - 9.0, s.color);
        let _ = writeln!(out, r#"<text x="{}" y="{ly}">{}</text>"#, WIDTH - 154.0, escape(s.label));
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_both_kinds() {
        let pts = [(0.1, 0.9), (0.2, 0.5), (0.3, 0.2)];
        let svg = plot(
            "t <1>",
            "x",
            "y",
            &[
                Series { points: &pts, line: true, color: "black", label: "line" },
                Series { points: &pts, line: false, color: "red", label: "dots" },
            ],
        );
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("t &lt;1&gt;"));
    }
}
