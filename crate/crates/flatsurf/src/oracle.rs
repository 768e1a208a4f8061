//! Reference tracer by planar unfolding.
//!
//! The trajectory is kept as one fixed line in the plane and translated copies
//! of the polygons are laid along it. Each step intersects the line with the
//! sides of the current copy, so no point is ever moved between polygons.
//! It shares nothing with [`crate::flow`] beyond the surface data.

use crate::geometry::{EdgeRef, Surface, SurfacePoint};
use crate::vec2::Vec2;
use crate::{Error, Label, Result, EPS_HIT};

/// Labels of the first `n` crossings of the line `start + t dir`, `t > 0`.
pub fn unfold_labels(s: &Surface, start: SurfacePoint, dir: Vec2, n: usize) -> Result<Vec<Label>> {
    let origin = start.pos;
    let mut poly = start.poly;
    let mut offset = Vec2::ZERO;
    let mut t_prev = f64::NEG_INFINITY;
    let mut out = Vec::with_capacity(n);
    let len = dir.norm();
    for k in 0..n {
        let polygon = s.polygon(poly);
        let mut best: Option<(f64, usize)> = None;
        for i in 0..polygon.edge_count() {
            let (a, b) = polygon.edge(i);
            let (a, b) = (a + offset, b + offset);
            let e = b - a;
            // origin + t dir = a + u e, solved by Cramer's rule
            let det = e.x * dir.y - e.y * dir.x;
            if det.abs() < 1e-14 {
                continue;
            }
            let r = a - origin;
            let t = (e.x * r.y - e.y * r.x) / det;
            let u = (dir.x * r.y - dir.y * r.x) / det;
            let slack = EPS_HIT / e.norm();
            if !(-slack..=1.0 + slack).contains(&u) {
                continue;
            }
            if best.is_none_or(|(bt, _)| t > bt) {
                best = Some((t, i));
            }
        }
        let (t, i) = best.ok_or(Error::OffSurface(start))?;
        if t <= t_prev {
            return Err(Error::OffSurface(start));
        }
        let (a, b) = polygon.edge(i);
        let hit = origin + dir * t - offset;
        if hit.dist(a) <= EPS_HIT || hit.dist(b) <= EPS_HIT || len == 0.0 {
            return Err(Error::VertexHit {
                index: k,
                partial: Box::default(),
            });
        }
        let e = EdgeRef::new(poly, i);
        out.push(s.label(e));
        let f = s.partner(e);
        // the partner copy sits so that its edge coincides with this one
        let (_, fb) = s.segment(f);
        offset = offset + a - fb;
        poly = f.poly;
        t_prev = t;
    }
    Ok(out)
}
