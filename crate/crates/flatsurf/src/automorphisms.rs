//! The flip `R`, the shear `S_M` and the flip-shear `V_M = S_M ∘ R`.
//!
//! The shear is applied cylinder by cylinder in an unrolled chart: each
//! cylinder becomes a horizontal strip `0 <= v <= H`, periodic in `u` with
//! period `W`, and the shear is `(u, v) -> (u + M v mod W, v)`. For a typical
//! cylinder `M H = W`; for an exceptional one `M H = 2W`, a double twist.

use std::f64::consts::TAU;

use crate::cylinders::{decompose, perfectness_of, Cylinder, PerfectnessReport};
use crate::geometry::{cluster_index, EdgeRef, Side, Surface, SurfacePoint};
use crate::vec2::Vec2;
use crate::{eps_geom, Error, Result};

/// Cylinder charts of a surface, computed once and shared read-only.
#[derive(Clone, Debug)]
pub struct Charts<'a> {
    surface: &'a Surface,
    cylinders: Vec<Cylinder>,
    /// `[poly][band] -> (cylinder, trapezoid)`
    band_index: Vec<Vec<(usize, usize)>>,
    levels: Vec<Vec<f64>>,
    report: PerfectnessReport,
}

impl<'a> Charts<'a> {
    pub fn new(surface: &'a Surface) -> Result<Self> {
        let cylinders = decompose(surface)?;
        let levels: Vec<Vec<f64>> = surface.polygons().iter().map(|p| p.levels()).collect();
        let mut band_index: Vec<Vec<(usize, usize)>> = levels
            .iter()
            .map(|l| vec![(usize::MAX, usize::MAX); l.len().saturating_sub(1)])
            .collect();
        for (c, cyl) in cylinders.iter().enumerate() {
            for (j, t) in cyl.trapezoids.iter().enumerate() {
                band_index[t.poly][t.band] = (c, j);
            }
        }
        let report = perfectness_of(surface, &cylinders);
        Ok(Charts {
            surface,
            cylinders,
            band_index,
            levels,
            report,
        })
    }

    pub fn surface(&self) -> &'a Surface {
        self.surface
    }

    pub fn cylinders(&self) -> &[Cylinder] {
        &self.cylinders
    }

    pub fn perfectness(&self) -> &PerfectnessReport {
        &self.report
    }

    /// The common modulus, if the surface is perfect.
    pub fn modulus(&self) -> Result<f64> {
        if self.report.is_perfect {
            Ok(self.report.common_modulus)
        } else {
            Err(Error::NotPerfect)
        }
    }

    /// Cylinder and trapezoid holding `p`. A point on a horizontal boundary
    /// belongs to the band above it, except on the top of a polygon.
    pub fn locate(&self, p: SurfacePoint) -> Result<(usize, usize)> {
        let eps = eps_geom();
        let poly = self
            .surface
            .polygons()
            .get(p.poly)
            .ok_or(Error::OffSurface(p))?;
        if !poly.contains(p.pos, 1e3 * eps) {
            return Err(Error::OffSurface(p));
        }
        let levels = &self.levels[p.poly];
        let nb = levels.len() - 1;
        let band = match cluster_index(levels, p.pos.y, eps) {
            Some(k) => k.min(nb - 1),
            None => levels.partition_point(|&l| l < p.pos.y).saturating_sub(1).min(nb - 1),
        };
        Ok(self.band_index[p.poly][band])
    }

    /// Chart coordinates `(u, v)` of `p` in its cylinder.
    pub fn to_chart(&self, p: SurfacePoint) -> Result<(usize, Vec2)> {
        let (c, j) = self.locate(p)?;
        Ok((c, p.pos + self.cylinders[c].offsets[j]))
    }

    /// Inverse of [`Charts::to_chart`]; `u` is taken modulo the circumference.
    /// A point on the seam between two trapezoids goes to the left one.
    pub fn from_chart(&self, c: usize, uv: Vec2) -> SurfacePoint {
        let cyl = &self.cylinders[c];
        let v = uv.y.clamp(0.0, cyl.height);
        let chart_left = |j: usize| {
            let t = &cyl.trapezoids[j];
            let off = cyl.offsets[j];
            t.left_at(v - off.y) + off.x
        };
        let chart_right = |j: usize| {
            let t = &cyl.trapezoids[j];
            let off = cyl.offsets[j];
            t.right_at(v - off.y) + off.x
        };
        let base = chart_left(0);
        let mut u = base + (uv.x - base).rem_euclid(cyl.width);
        if u >= base + cyl.width {
            u = base;
        }
        let last = cyl.trapezoids.len() - 1;
        let j = (0..last).find(|&j| u <= chart_right(j)).unwrap_or(last);
        let off = cyl.offsets[j];
        SurfacePoint::new(cyl.trapezoids[j].poly, Vec2::new(u, v) - off)
    }
}

/// Reflection of `p` through the symmetry axis of its polygon.
pub fn flip_point(s: &Surface, p: SurfacePoint) -> SurfacePoint {
    SurfacePoint::new(p.poly, s.polygon(p.poly).reflect(p.pos))
}

/// The shear `S_M`, fixing every cylinder boundary pointwise.
pub fn shear_point(charts: &Charts, p: SurfacePoint) -> Result<SurfacePoint> {
    let m = charts.modulus()?;
    let (c, uv) = charts.to_chart(p)?;
    Ok(charts.from_chart(c, Vec2::new(uv.x + m * uv.y, uv.y)))
}

/// The flip-shear `V_M = S_M ∘ R`.
pub fn flip_shear_point(charts: &Charts, p: SurfacePoint) -> Result<SurfacePoint> {
    shear_point(charts, flip_point(charts.surface(), p))
}

/// Derivative of `V_M` applied to a vector: `(x, y) -> (-x + M y, y)`.
pub fn flip_shear_vector(d: Vec2, m: f64) -> Vec2 {
    Vec2::new(-d.x + m * d.y, d.y)
}

/// Angle of the image of the direction `theta` under the derivative of
/// `V_M`, in `[0, 2π)`.
pub fn flip_shear_direction(theta: f64, m: f64) -> f64 {
    let a = flip_shear_vector(Vec2::from_angle(theta), m).angle();
    let a = a.rem_euclid(TAU);
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Clips the segment `p + s (q - p)`, `s ∈ [0, 1]`, to a convex polygon.
fn clip_to_convex(p: Vec2, q: Vec2, poly: &[Vec2]) -> Option<(f64, f64)> {
    let d = q - p;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let e = poly[(i + 1) % n] - a;
        if e.norm() <= eps_geom() {
            continue;
        }
        // inside is to the left of each counterclockwise edge
        let num = e.cross(p - a);
        let den = e.cross(d);
        if den.abs() < 1e-15 {
            if num < -1e-12 {
                return None;
            }
            continue;
        }
        let s = -num / den;
        if den > 0.0 {
            lo = lo.max(s);
        } else {
            hi = hi.min(s);
        }
        if lo > hi + 1e-12 {
            return None;
        }
    }
    (hi - lo > 1e-12).then_some((lo, hi))
}

/// Image of a polygon edge under `V_M`, as segments in polygon coordinates.
pub fn sheared_edge(charts: &Charts, e: EdgeRef) -> Result<Vec<(usize, Vec2, Vec2)>> {
    let m = charts.modulus()?;
    let s = charts.surface();
    let (a, b) = s.segment(e);
    let poly = s.polygon(e.poly);
    if s.side(e).is_horizontal() {
        // V_M is an isometry on horizontal segments and fixes them setwise
        return Ok(vec![(e.poly, poly.reflect(b), poly.reflect(a))]);
    }
    let band = poly.edge_level(e.edge);
    let (c, j) = charts.band_index[e.poly][band];
    let cyl = &charts.cylinders[c];
    let off = cyl.offsets[j];
    let (lo, hi) = if s.side(e) == Side::Right { (a, b) } else { (b, a) };
    let p = poly.reflect(lo) + off;
    let q = poly.reflect(hi) + off;
    let (p, q) = (Vec2::new(p.x + m * p.y, p.y), Vec2::new(q.x + m * q.y, q.y));

    let span = (q.x - p.x).abs() + cyl.width;
    let kmax = (span / cyl.width).ceil() as i64 + 2;
    let mut pieces = Vec::new();
    for k in -kmax..=kmax {
        let shift = Vec2::new(k as f64 * cyl.width, 0.0);
        for (t, toff) in cyl.trapezoids.iter().zip(&cyl.offsets) {
            let quad: Vec<Vec2> = t.corners.iter().map(|&x| x + *toff + shift).collect();
            if let Some((s0, s1)) = clip_to_convex(p, q, &quad) {
                let back = *toff + shift;
                pieces.push((s0, t.poly, p.lerp(q, s0) - back, p.lerp(q, s1) - back));
            }
        }
    }
    pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(pieces.into_iter().map(|(_, poly, x, y)| (poly, x, y)).collect())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::geometry::{build_bouw_moller, build_regular_surface};

    #[test]
    fn axis_points_are_fixed_by_flip() {
        let s = build_regular_surface(8, false).unwrap();
        let poly = s.polygon(0);
        let p = SurfacePoint::new(0, Vec2::new(poly.axis_x(), 0.7));
        let r = flip_point(&s, p);
        assert!(r.pos.dist(p.pos) < 1e-15);
    }

    #[test]
    fn bottom_points_are_fixed_by_shear() {
        let s = build_regular_surface(8, false).unwrap();
        let charts = Charts::new(&s).unwrap();
        let (a, b) = s.segment(EdgeRef::new(0, 0));
        let p = SurfacePoint::new(0, a.lerp(b, 0.3));
        let q = shear_point(&charts, p).unwrap();
        assert!(s.same_point(p, q, 1e-9));
    }

    #[test]
    fn tops_are_fixed_by_shear() {
        // a point on the top of every cylinder of the octagon, including the
        // exceptional rectangle where the twist is doubled
        let s = build_regular_surface(8, false).unwrap();
        let charts = Charts::new(&s).unwrap();
        let m = charts.modulus().unwrap();
        for c in charts.cylinders() {
            let shift = m * c.height;
            let turns = shift / c.width;
            assert!((turns - turns.round()).abs() < 1e-9);
            let t = &c.trapezoids[0];
            let y = t.top() - 1e-13;
            let x = 0.5 * (t.left_at(y) + t.right_at(y));
            let p = SurfacePoint::new(t.poly, Vec2::new(x, y));
            let q = shear_point(&charts, p).unwrap();
            assert!(s.same_point(p, q, 1e-9), "{p} -> {q}");
        }
    }

    #[test]
    fn direction_map() {
        let a = flip_shear_direction(0.0, 2.0);
        assert!((a - PI).abs() < 1e-15);
        let theta = PI / 16.0;
        let v = flip_shear_vector(Vec2::from_angle(theta), 2.0);
        let expect = Vec2::new(-theta.cos() + 2.0 * theta.sin(), theta.sin());
        assert!(v.dist(expect) < 1e-15);
        let back = flip_shear_vector(v, 2.0);
        assert!(back.dist(Vec2::from_angle(theta)) < 1e-15);
    }

    #[test]
    fn shear_needs_perfect_surface() {
        use crate::geometry::{Family, Polygon};
        // two rectangles of different moduli glued into two cylinders
        let a = Polygon::from_vertices(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ]);
        let b = Polygon::from_vertices(vec![
            Vec2::new(3.0, 0.0),
            Vec2::new(4.0, 0.0),
            Vec2::new(4.0, 2.0),
            Vec2::new(3.0, 2.0),
        ]);
        let s = Surface::new(
            vec![a, b],
            &[
                (EdgeRef::new(0, 0), EdgeRef::new(1, 2)),
                (EdgeRef::new(1, 0), EdgeRef::new(0, 2)),
                (EdgeRef::new(0, 1), EdgeRef::new(0, 3)),
                (EdgeRef::new(1, 1), EdgeRef::new(1, 3)),
            ],
            Family::Custom,
        )
        .unwrap();
        let charts = Charts::new(&s).unwrap();
        let p = SurfacePoint::new(0, Vec2::new(0.5, 0.5));
        assert!(matches!(shear_point(&charts, p), Err(Error::NotPerfect)));
    }

    #[test]
    fn sheared_edges_meet_their_originals() {
        let s = build_bouw_moller(3, 4).unwrap();
        let charts = Charts::new(&s).unwrap();
        for e in s.edges() {
            let pieces = sheared_edge(&charts, e).unwrap();
            assert!(!pieces.is_empty());
        }
    }

    #[test]
    fn flip_shear_is_an_involution() {
        use crate::sampling::Sampler;
        for s in [build_regular_surface(8, false).unwrap(), build_bouw_moller(4, 3).unwrap()] {
            let charts = Charts::new(&s).unwrap();
            let mut sampler = Sampler::new(&s, 11);
            for _ in 0..1000 {
                let p = sampler.point();
                let q = flip_shear_point(&charts, flip_shear_point(&charts, p).unwrap()).unwrap();
                assert!(s.same_point(p, q, 1e-9), "{p} -> {q}");
                let r = flip_point(&s, flip_point(&s, p));
                assert!(r.pos.dist(p.pos) < 1e-12);
            }
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        use crate::sampling::Sampler;
        let s = build_bouw_moller(3, 4).unwrap();
        let charts = Charts::new(&s).unwrap();
        let m = charts.modulus().unwrap();
        let mut sampler = Sampler::new(&s, 5);
        let h = 1e-7;
        let mut checked = 0;
        for _ in 0..500 {
            let p = sampler.point();
            let vp = flip_shear_point(&charts, p).unwrap();
            let mut cols = Vec::new();
            for d in [Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)] {
                let q = SurfacePoint::new(p.poly, p.pos + d * h);
                if !s.polygon(p.poly).contains(q.pos, 0.0) || charts.locate(q).ok() != charts.locate(p).ok() {
                    break;
                }
                let vq = flip_shear_point(&charts, q).unwrap();
                if vq.poly != vp.poly {
                    break;
                }
                cols.push((vq.pos - vp.pos) / h);
            }
            if cols.len() < 2 {
                continue;
            }
            assert!(cols[0].dist(flip_shear_vector(Vec2::new(1.0, 0.0), m)) < 1e-6);
            assert!(cols[1].dist(flip_shear_vector(Vec2::new(0.0, 1.0), m)) < 1e-6);
            checked += 1;
        }
        assert!(checked > 100);
    }

    #[test]
    fn chart_round_trip() {
        use crate::sampling::Sampler;
        let s = build_bouw_moller(5, 4).unwrap();
        let charts = Charts::new(&s).unwrap();
        let mut sampler = Sampler::new(&s, 9);
        for _ in 0..500 {
            let p = sampler.point();
            let (c, uv) = charts.to_chart(p).unwrap();
            let q = charts.from_chart(c, uv);
            assert_eq!(q.poly, p.poly);
            assert!(q.pos.dist(p.pos) < 1e-9);
        }
    }

    #[test]
    fn glued_points_have_glued_images() {
        let s = build_bouw_moller(3, 4).unwrap();
        let charts = Charts::new(&s).unwrap();
        for e in s.edges() {
            let (a, b) = s.segment(e);
            let p = SurfacePoint::new(e.poly, a.lerp(b, 0.37));
            let q = SurfacePoint::new(s.partner(e).poly, p.pos + s.translation(e));
            let vp = flip_shear_point(&charts, p).unwrap();
            let vq = flip_shear_point(&charts, q).unwrap();
            assert!(s.same_point(vp, vq, 1e-9), "{e}: {vp} vs {vq}");
        }
    }

    fn segments_meet(a: (Vec2, Vec2), b: (Vec2, Vec2)) -> bool {
        let d1 = a.1 - a.0;
        let d2 = b.1 - b.0;
        let den = d1.cross(d2);
        let r = b.0 - a.0;
        if den.abs() < 1e-14 {
            // parallel: they meet only if collinear and overlapping
            if d1.cross(r).abs() > 1e-9 * d1.norm() {
                return false;
            }
            let len2 = d1.dot(d1);
            let (s0, s1) = (r.dot(d1) / len2, (b.1 - a.0).dot(d1) / len2);
            return s0.min(s1) <= 1.0 + 1e-9 && s0.max(s1) >= -1e-9;
        }
        let t = r.cross(d2) / den;
        let u = r.cross(d1) / den;
        (-1e-9..=1.0 + 1e-9).contains(&t) && (-1e-9..=1.0 + 1e-9).contains(&u)
    }

    #[test]
    fn sheared_gluing_edges_cross_their_originals() {
        let surfaces = [
            build_regular_surface(8, false).unwrap(),
            build_regular_surface(5, true).unwrap(),
            build_regular_surface(7, true).unwrap(),
            build_bouw_moller(3, 4).unwrap(),
            build_bouw_moller(4, 3).unwrap(),
            build_bouw_moller(6, 5).unwrap(),
        ];
        for s in &surfaces {
            let charts = Charts::new(s).unwrap();
            for e in s.edges().filter(|e| !s.side(*e).is_horizontal()) {
                let pieces = sheared_edge(&charts, e).unwrap();
                let originals = [e, s.partner(e)];
                let meets = pieces.iter().any(|&(poly, x, y)| {
                    originals
                        .iter()
                        .filter(|o| o.poly == poly)
                        .any(|o| segments_meet((x, y), s.segment(*o)))
                });
                assert!(meets, "{} edge {e}", s.family().name());
            }
        }
    }
}
