//! Minimal log-log scatter plot with a fitted line, emitted as SVG text.

use std::fmt::Write as _;

use specmix_core::format::fmt12;
use specmix_core::scstc::SlopeFit;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 64.0;

/// Decade-aligned range in log10 units covering `values`.
fn decades(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        let l = v.log10();
        (a.min(l), b.max(l))
    });
    let (lo, hi) = (lo.floor(), hi.ceil());
    if hi > lo {
        (lo, hi)
    } else {
        (lo, lo + 1.0)
    }
}

struct Axes {
    x: (f64, f64),
    y: (f64, f64),
}

impl Axes {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x.log10() - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y.log10() - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn tick_label(exp: f64) -> String {
    format!("1e{}", exp as i64)
}

/// `points` must be strictly positive. The fit line spans the data's x range
/// and carries its slope, at 12 significant digits, in a `data-slope` attribute.
pub fn loglog_svg(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)], fit: Option<&SlopeFit>) -> String {
    let axes = Axes {
        x: decades(points.iter().map(|p| p.0)),
        y: decades(points.iter().map(|p| p.1)),
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));

    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(s, r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - x0, y1 - y0);
    for e in (axes.x.0 as i64)..=(axes.x.1 as i64) {
        let px = axes.px(10f64.powi(e as i32));
        let _ = writeln!(s, r##"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{y1}" stroke="#ddd"/>"##);
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#, y1 + 18.0, tick_label(e as f64));
    }
    for e in (axes.y.0 as i64)..=(axes.y.1 as i64) {
        let py = axes.py(10f64.powi(e as i32));
        let _ = writeln!(s, r##"<line x1="{x0}" y1="{py:.2}" x2="{x1}" y2="{py:.2}" stroke="#ddd"/>"##);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 6.0, py + 4.0, tick_label(e as f64));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, HEIGHT - 16.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="20" y="{cy}" text-anchor="middle" transform="rotate(-90 20 {cy})">{}</text>"#,
        escape(y_label),
        cy = (y0 + y1) / 2.0
    );

    if let Some(f) = fit {
        let (lo, hi) = points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
        let line = |x: f64| (f.intercept + f.slope * x.ln()).exp();
        let _ = writeln!(
            s,
            r##"<line class="fit" data-slope="{}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c0392b" stroke-width="1.5"/>"##,
            fmt12(f.slope),
            axes.px(lo),
            axes.py(line(lo)),
            axes.px(hi),
            axes.py(line(hi))
        );
    }
    for &(x, y) in points {
        let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="4" fill="#2c3e50"/>"##, axes.px(x), axes.py(y));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decade_ranges() {
        assert_eq!(decades([0.05, 0.4].into_iter()), (-2.0, 0.0));
        assert_eq!(decades([10.0, 10.0].into_iter()), (1.0, 2.0));
    }

    #[test]
    fn fit_line_slope_matches_in_pixels() {
        let pts = [(0.1, 1.0), (1.0, 0.1), (10.0, 0.01)];
        let fit = SlopeFit {
            slope: -1.0,
            intercept: (0.1f64).ln(),
            r_squared: 1.0,
            points: 3,
        };
        let svg = loglog_svg("t", "x", "y", &pts, Some(&fit));
        assert!(svg.contains(r#"class="fit" data-slope="-1""#));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.ends_with("</svg>\n"));
    }
}
