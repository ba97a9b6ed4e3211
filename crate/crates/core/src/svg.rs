//! Minimal self-contained SVG line plots.

use std::fmt::Write;

const W: f64 = 480.0;
const H: f64 = 360.0;
const PAD: f64 = 40.0;

/// Polyline of `(x, y)` points with axes and range labels.
pub fn line_plot(points: &[(f64, f64)], x_label: &str, y_label: &str) -> String {
    let finite: Vec<(f64, f64)> = points.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    let (mut x0, mut x1, mut y0, mut y1) = finite.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    if finite.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{p} {q} H{r} M{p} {q} V{t}" stroke="black" fill="none"/>"#,
        p = PAD,
        q = H - PAD,
        r = W - PAD,
        t = PAD
    );
    let mut path = String::new();
    for (i, &(x, y)) in finite.iter().enumerate() {
        let _ = write!(path, "{}{:.2},{:.2} ", if i == 0 { "M" } else { "L" }, sx(x), sy(y));
    }
    let _ = writeln!(s, r#"<path d="{}" stroke="steelblue" fill="none"/>"#, path.trim_end());
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">{}</text>"#, W / 2.0, H - 8.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="12" y="{}" font-size="11" transform="rotate(-90 12 {})" text-anchor="middle">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
    let _ = writeln!(s, r#"<text x="{PAD}" y="{}" font-size="9">{x0:.3e}</text>"#, H - PAD + 12.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="9" text-anchor="end">{x1:.3e}</text>"#, W - PAD, H - PAD + 12.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="9" text-anchor="end">{y0:.3e}</text>"#, PAD - 2.0, H - PAD);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="9" text-anchor="end">{y1:.3e}</text>"#, PAD - 2.0, PAD + 8.0);
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plot_is_well_formed() {
        let s = line_plot(&[(0.0, 1.0), (1.0, 2.0), (2.0, f64::NAN)], "x<1>", "y");
        assert!(s.starts_with("<svg"));
        assert!(s.trim_end().ends_with("</svg>"));
        assert!(s.contains("x&lt;1&gt;"));
        assert_eq!(s.matches(" L").count() + s.matches("\"M").count(), 3);
    }

    #[test]
    fn empty_plot() {
        assert!(line_plot(&[], "a", "b").contains("</svg>"));
    }
}
