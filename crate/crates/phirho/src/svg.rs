//! Static SVG scatter plot of the (φ, ρ) plane.

use std::fmt::Write;

use phirho_core::bounds::Curve;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 560.0;
const MARGIN: f64 = 56.0;
const PHI_RANGE: (f64, f64) = (-0.5, 1.0);
const RHO_RANGE: (f64, f64) = (-1.0, 1.0);

fn colour(curve: Curve) -> &'static str {
    match curve {
        Curve::Lower => "#1f77b4",
        Curve::Upper => "#d62728",
        Curve::R => "#2ca02c",
        Curve::S => "#9467bd",
    }
}

fn px(phi: f64) -> f64 {
    MARGIN + (phi - PHI_RANGE.0) / (PHI_RANGE.1 - PHI_RANGE.0) * (WIDTH - 2.0 * MARGIN)
}

fn py(rho: f64) -> f64 {
    HEIGHT - MARGIN - (rho - RHO_RANGE.0) / (RHO_RANGE.1 - RHO_RANGE.0) * (HEIGHT - 2.0 * MARGIN)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// A scatter point; `highlight` marks points on the upper bound.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotPoint {
    pub label: String,
    pub phi: f64,
    pub rho: f64,
    pub highlight: bool,
}

/// Points outside the axes are clamped to the frame. Curves are drawn in
/// the order given, each as one polyline through its samples sorted by x.
pub fn render(points: &[PlotPoint], curves: &[(Curve, Vec<(f64, f64)>)]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (x0, x1, y0, y1) = (px(PHI_RANGE.0), px(PHI_RANGE.1), py(RHO_RANGE.0), py(RHO_RANGE.1));
    let _ =
        writeln!(s, r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - x0, y0 - y1);
    for i in 0..=6 {
        let phi = PHI_RANGE.0 + 0.25 * i as f64;
        let x = px(phi);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{phi}</text>"#, y0 + 18.0);
    }
    for i in 0..=8 {
        let rho = RHO_RANGE.0 + 0.25 * i as f64;
        let y = py(rho);
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{rho}</text>"#, x0 - 8.0, y + 4.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">φ (footrule)</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">ρ (Spearman)</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    for (curve, samples) in curves {
        let mut pts = samples.clone();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| {
                format!("{:.2},{:.2}", px(x.clamp(PHI_RANGE.0, PHI_RANGE.1)), py(y.clamp(RHO_RANGE.0, RHO_RANGE.1)))
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="curve-{}" fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            curve.name(),
            colour(*curve),
            path.join(" ")
        );
    }

    for p in points {
        let (x, y) = (px(p.phi.clamp(PHI_RANGE.0, PHI_RANGE.1)), py(p.rho.clamp(RHO_RANGE.0, RHO_RANGE.1)));
        let fill = if p.highlight { "#d62728" } else { "#333333" };
        let _ = writeln!(
            s,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{fill}" fill-opacity="0.7"><title>{}</title></circle>"#,
            escape(&p.label)
        );
    }

    let mut ly = y1 + 14.0;
    for (curve, _) in curves {
        let lx = x1 - 90.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            colour(*curve),
            lx + 26.0,
            ly + 4.0,
            curve.name()
        );
        ly += 16.0;
    }
    if !points.is_empty() {
        let lx = x1 - 80.0;
        let _ = writeln!(
            s,
            r##"<circle cx="{lx:.2}" cy="{ly:.2}" r="3" fill="#333333"/><text x="{:.2}" y="{:.2}">points ({})</text>"##,
            lx + 16.0,
            ly + 4.0,
            points.len()
        );
    }
    s.push_str("</svg>\n");
    s
}
