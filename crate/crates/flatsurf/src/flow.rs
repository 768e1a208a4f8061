//! Straight-line flow and cutting sequences.

use serde::{Deserialize, Serialize};

use crate::geometry::{EdgeRef, Surface, SurfacePoint};
use crate::vec2::Vec2;
use crate::{eps_geom, Error, Label, Result, EPS_HIT};

/// A geodesic: a start point and a direction angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub start: SurfacePoint,
    pub theta: f64,
}

impl Trajectory {
    pub fn new(start: SurfacePoint, theta: f64) -> Self {
        Trajectory { start, theta }
    }

    pub fn direction(&self) -> Vec2 {
        Vec2::from_angle(self.theta)
    }
}

/// One edge crossing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub label: Label,
    /// The edge the trajectory leaves through.
    pub edge: EdgeRef,
    /// Exit point, in the coordinates of `edge.poly`.
    pub point: Vec2,
    /// Flow parameter in units of the direction vector.
    pub t: f64,
}

/// A finite window of a cutting sequence.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CuttingSequence {
    pub labels: Vec<Label>,
    pub crossings: Vec<Crossing>,
}

impl CuttingSequence {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn from_labels(labels: Vec<Label>) -> Self {
        CuttingSequence {
            labels,
            crossings: Vec::new(),
        }
    }

    fn push(&mut self, c: Crossing) {
        self.labels.push(c.label);
        self.crossings.push(c);
    }
}

/// Where a ray from `p` leaves the convex polygon: `(edge, t)`.
fn exit_edge(s: &Surface, poly: usize, p: Vec2, d: Vec2) -> Option<(usize, f64)> {
    let polygon = s.polygon(poly);
    let mut best: Option<(usize, f64)> = None;
    for i in 0..polygon.edge_count() {
        let (a, b) = polygon.edge(i);
        let e = b - a;
        // outward normal of a counterclockwise edge
        let nrm = Vec2::new(e.y, -e.x);
        let speed = d.dot(nrm);
        if speed <= 0.0 {
            continue;
        }
        let t = (a - p).dot(nrm) / speed;
        if best.is_none_or(|(_, bt)| t < bt) {
            best = Some((i, t));
        }
    }
    best
}

/// Flows from `start` along `dir` (not necessarily unit) for `n` crossings.
///
/// Crossing parameters are measured in units of `dir`.
pub fn flow_vector(s: &Surface, start: SurfacePoint, dir: Vec2, n: usize) -> Result<CuttingSequence> {
    if n == 0 {
        return Err(Error::InvalidParams("need at least one crossing".into()));
    }
    if dir.norm() <= eps_geom() {
        return Err(Error::InvalidParams("direction vector is zero".into()));
    }
    if start.poly >= s.polygons().len() || !s.polygon(start.poly).contains(start.pos, 1e3 * eps_geom()) {
        return Err(Error::OffSurface(start));
    }
    let mut seq = CuttingSequence::default();
    let (mut poly, mut p, mut t_total) = (start.poly, start.pos, 0.0);
    if s.polygon(poly).vertices().iter().any(|v| v.dist(p) <= EPS_HIT) {
        return Err(Error::VertexHit {
            index: 0,
            partial: Box::new(seq),
        });
    }
    for k in 0..n {
        let (i, t) = exit_edge(s, poly, p, dir).expect("a ray leaves a bounded polygon");
        let q = p + dir * t;
        let e = EdgeRef::new(poly, i);
        let (a, b) = s.segment(e);
        if q.dist(a) <= EPS_HIT || q.dist(b) <= EPS_HIT {
            return Err(Error::VertexHit {
                index: k,
                partial: Box::new(seq),
            });
        }
        t_total += t.max(0.0);
        seq.push(Crossing {
            label: s.label(e),
            edge: e,
            point: q,
            t: t_total,
        });
        let f = s.partner(e);
        p = q + s.translation(e);
        poly = f.poly;
    }
    Ok(seq)
}

/// The first `n` crossings of the trajectory.
pub fn flow(s: &Surface, t: &Trajectory, n: usize) -> Result<CuttingSequence> {
    flow_vector(s, t.start, t.direction(), n)
}

/// Point reached just after crossing `k` (in the polygon entered).
pub fn entry_point(s: &Surface, c: &Crossing) -> SurfacePoint {
    let f = s.partner(c.edge);
    SurfacePoint::new(f.poly, c.point + s.translation(c.edge))
}

/// Segments of the trajectory inside each polygon, for drawing:
/// `(poly, from, to)`.
pub fn segments(s: &Surface, start: SurfacePoint, seq: &CuttingSequence) -> Vec<(usize, Vec2, Vec2)> {
    let mut out = Vec::with_capacity(seq.len());
    let mut from = start;
    for c in &seq.crossings {
        out.push((from.poly, from.pos, c.point));
        from = entry_point(s, c);
    }
    out
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::geometry::{build_regular_surface, square_torus};

    #[test]
    fn horizontal_flow_on_torus() {
        let s = square_torus();
        let t = Trajectory::new(SurfacePoint::new(0, Vec2::new(0.3, 0.5)), 0.0);
        let seq = flow(&s, &t, 10).unwrap();
        let vertical = s.label(EdgeRef::new(0, 1));
        assert!(seq.labels.iter().all(|&l| l == vertical));
        for (k, c) in seq.crossings.iter().enumerate() {
            assert!((c.t - (0.7 + k as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn aiming_at_a_vertex_stops() {
        let s = build_regular_surface(8, false).unwrap();
        let poly = s.polygon(0);
        let start = poly.centroid();
        let target = poly.vertex(3);
        let theta = (target - start).angle();
        let t = Trajectory::new(SurfacePoint::new(0, start), theta);
        match flow(&s, &t, 5) {
            Err(Error::VertexHit { index, partial }) => {
                assert_eq!(index, 0);
                assert!(partial.is_empty());
            }
            other => panic!("expected a vertex hit, got {other:?}"),
        }
    }

    #[test]
    fn crossings_land_on_their_edges() {
        let s = build_regular_surface(5, true).unwrap();
        let c = s.polygon(0).centroid();
        let t = Trajectory::new(SurfacePoint::new(0, c + Vec2::new(0.01, 0.02)), PI / 13.0);
        let seq = flow(&s, &t, 40).unwrap();
        for x in &seq.crossings {
            let (a, b) = s.segment(x.edge);
            let off = (b - a).cross(x.point - a).abs() / (b - a).norm();
            assert!(off < 1e-9);
            let y = entry_point(&s, x);
            let (c, d) = s.segment(s.partner(x.edge));
            assert!(((d - c).cross(y.pos - c) / (d - c).norm()).abs() < 1e-9);
        }
        assert!(seq.crossings.windows(2).all(|w| w[1].t > w[0].t));
    }
}
