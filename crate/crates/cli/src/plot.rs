//! Scatter plots of a prediction against its reference front, written as SVG.

use std::fmt::Write as _;

const SIZE: f64 = 420.0;
const MARGIN: f64 = 48.0;
/// Visible range of both normalized axes.
const LO: f64 = -0.1;
const HI: f64 = 1.3;

fn sx(v: f64) -> f64 {
    MARGIN + (v.clamp(LO, HI) - LO) / (HI - LO) * (SIZE - 2.0 * MARGIN)
}

fn sy(v: f64) -> f64 {
    SIZE - MARGIN - (v.clamp(LO, HI) - LO) / (HI - LO) * (SIZE - 2.0 * MARGIN)
}

/// `reference` and `predicted` are in normalized objective space; points
/// outside the view are pinned to its edge.
pub fn frontier_svg(title: &str, reference: &[[f64; 2]], predicted: &[[f64; 2]]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{}</text>"#, SIZE / 2.0, escape(title));

    for t in [0.0, 0.5, 1.0] {
        let (x, y) = (sx(t), sy(t));
        let _ = writeln!(s, r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#ddd"/>"##, sy(LO), sy(HI));
        let _ = writeln!(s, r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/>"##, sx(LO), sx(HI));
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{t}</text>"#, SIZE - MARGIN + 16.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{t}</text>"#, MARGIN - 6.0, y + 4.0);
    }
    let _ = writeln!(
        s,
        r#"<rect x="{m}" y="{m}" width="{w}" height="{w}" fill="none" stroke="black"/>"#,
        m = MARGIN,
        w = SIZE - 2.0 * MARGIN
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">f1 (normalized)</text>"#, SIZE / 2.0, SIZE - 10.0);
    let _ = writeln!(
        s,
        r#"<text x="14" y="{c}" text-anchor="middle" transform="rotate(-90 14 {c})">f2 (normalized)</text>"#,
        c = SIZE / 2.0
    );

    let mut sorted = reference.to_vec();
    sorted.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let path: Vec<String> = sorted.iter().map(|p| format!("{:.1},{:.1}", sx(p[0]), sy(p[1]))).collect();
    let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="1"/>"##, path.join(" "));
    for p in &sorted {
        let _ = writeln!(s, r##"<circle cx="{:.1}" cy="{:.1}" r="3" fill="#1f77b4"/>"##, sx(p[0]), sy(p[1]));
    }
    for p in predicted {
        let (x, y) = (sx(p[0]), sy(p[1]));
        let _ = writeln!(
            s,
            r##"<path d="M{:.1},{:.1}L{:.1},{:.1}M{:.1},{:.1}L{:.1},{:.1}" stroke="#d62728" stroke-width="1.5"/>"##,
            x - 3.5,
            y - 3.5,
            x + 3.5,
            y + 3.5,
            x - 3.5,
            y + 3.5,
            x + 3.5,
            y - 3.5
        );
    }
    let lx = SIZE - MARGIN - 110.0;
    let _ = writeln!(s, r##"<circle cx="{:.1}" cy="{:.1}" r="3" fill="#1f77b4"/>"##, lx, MARGIN + 14.0);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">reference</text>"#, lx + 8.0, MARGIN + 18.0);
    let _ = writeln!(s, r##"<text x="{:.1}" y="{:.1}" fill="#d62728">× prediction</text>"##, lx - 4.0, MARGIN + 34.0);
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
    fn well_formed() {
        let svg = frontier_svg("a<b", &[[0.0, 1.0], [1.0, 0.0]], &[[0.5, 0.5], [9.0, -9.0]]);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("a&lt;b"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(!svg.contains("NaN"));
    }
}
