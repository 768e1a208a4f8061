//! Deterministic SVG pictures of a surface.

use std::fmt::Write as _;

use crate::automorphisms::{sheared_edge, Charts};
use crate::cylinders::decompose;
use crate::geometry::Surface;
use crate::vec2::Vec2;
use crate::Result;

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 20.0;
const PALETTE: [&str; 6] = ["#8dd3c7", "#fdb462", "#bebada", "#fb8072", "#80b1d3", "#b3de69"];

/// What to draw on top of the polygons.
#[derive(Clone, Debug, Default)]
pub struct SvgOptions {
    pub cylinders: bool,
    pub sheared: bool,
    /// Trajectory pieces as `(polygon, from, to)`.
    pub trajectory: Vec<(usize, Vec2, Vec2)>,
}

/// Formats a coordinate with six decimals, without a negative zero.
fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0.000000".into()
    } else {
        s
    }
}

struct Frame {
    lo: Vec2,
    hi_y: f64,
    scale: f64,
}

impl Frame {
    fn new(s: &Surface) -> Self {
        let (mut lo, mut hi) = (Vec2::new(f64::INFINITY, f64::INFINITY), Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in s.polygons() {
            let (a, b) = p.bbox();
            lo = Vec2::new(lo.x.min(a.x), lo.y.min(a.y));
            hi = Vec2::new(hi.x.max(b.x), hi.y.max(b.y));
        }
        let scale = (WIDTH - 2.0 * MARGIN) / (hi.x - lo.x).max(1e-12);
        Frame { lo, hi_y: hi.y, scale }
    }

    fn height(&self) -> f64 {
        (self.hi_y - self.lo.y) * self.scale + 2.0 * MARGIN
    }

    fn map(&self, p: Vec2) -> (String, String) {
        (
            num(MARGIN + (p.x - self.lo.x) * self.scale),
            num(MARGIN + (self.hi_y - p.y) * self.scale),
        )
    }

    fn points(&self, pts: &[Vec2]) -> String {
        pts.iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x},{y}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn line(&self, out: &mut String, a: Vec2, b: Vec2, style: &str) {
        let (x1, y1) = self.map(a);
        let (x2, y2) = self.map(b);
        let _ = writeln!(out, r#"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" {style}/>"#);
    }
}

pub fn render(s: &Surface, opts: &SvgOptions) -> Result<String> {
    let f = Frame::new(s);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        num(WIDTH),
        num(f.height()),
        num(WIDTH),
        num(f.height())
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if opts.cylinders {
        let _ = writeln!(out, r#"<g id="cylinders" stroke="none" fill-opacity="0.6">"#);
        for (i, c) in decompose(s)?.iter().enumerate() {
            for t in &c.trapezoids {
                let _ = writeln!(
                    out,
                    r#"<polygon points="{}" fill="{}"/>"#,
                    f.points(&t.corners),
                    PALETTE[i % PALETTE.len()]
                );
            }
        }
        out.push_str("</g>\n");
    }
    out.push_str("<g id=\"polygons\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\">\n");
    for p in s.polygons() {
        let _ = writeln!(out, r#"<polygon points="{}"/>"#, f.points(p.vertices()));
    }
    out.push_str("</g>\n");
    if opts.sheared {
        let charts = Charts::new(s)?;
        out.push_str("<g id=\"sheared\">\n");
        for e in s.edges().filter(|e| !s.side(*e).is_horizontal() && *e < s.partner(*e)) {
            for (_, a, b) in sheared_edge(&charts, e)? {
                f.line(&mut out, a, b, r##"stroke="#555555" stroke-width="1" stroke-dasharray="2,3""##);
            }
        }
        out.push_str("</g>\n");
    }
    if !opts.trajectory.is_empty() {
        out.push_str("<g id=\"trajectory\">\n");
        for &(_, a, b) in &opts.trajectory {
            f.line(&mut out, a, b, r##"stroke="#d62728" stroke-width="1""##);
        }
        out.push_str("</g>\n");
    }
    out.push_str("<g id=\"labels\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" dominant-baseline=\"middle\">\n");
    for e in s.edges() {
        let poly = s.polygon(e.poly);
        let (a, b) = s.segment(e);
        let mid = (a + b) * 0.5;
        let inward = poly.centroid() - mid;
        let pos = mid + inward * (14.0 / f.scale / inward.norm().max(1e-12));
        let (x, y) = f.map(pos);
        let _ = writeln!(out, r#"<text x="{x}" y="{y}">{}</text>"#, s.label(e));
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}
