//! Horizontal cylinder decomposition, moduli and the critical angle.

use serde::{Deserialize, Serialize};

use crate::geometry::{cluster_index, EdgeRef, Side, Surface};
use crate::vec2::Vec2;
use crate::{eps_geom, Error, Label, Result};

/// The part of a polygon between two consecutive vertex levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trapezoid {
    pub poly: usize,
    pub band: usize,
    /// Bottom-left, bottom-right, top-right, top-left; the two bottom (or
    /// two top) corners coincide for a triangle.
    pub corners: [Vec2; 4],
    pub left: EdgeRef,
    pub right: EdgeRef,
}

impl Trapezoid {
    pub fn bottom(&self) -> f64 {
        self.corners[0].y
    }

    pub fn top(&self) -> f64 {
        self.corners[2].y
    }

    pub fn height(&self) -> f64 {
        self.top() - self.bottom()
    }

    pub fn bottom_width(&self) -> f64 {
        self.corners[1].x - self.corners[0].x
    }

    pub fn top_width(&self) -> f64 {
        self.corners[2].x - self.corners[3].x
    }

    pub fn area(&self) -> f64 {
        0.5 * (self.bottom_width() + self.top_width()) * self.height()
    }

    /// Left boundary x at height `y` (polygon coordinates).
    pub fn left_at(&self, y: f64) -> f64 {
        let s = (y - self.bottom()) / self.height();
        self.corners[0].x + s * (self.corners[3].x - self.corners[0].x)
    }

    pub fn right_at(&self, y: f64) -> f64 {
        let s = (y - self.bottom()) / self.height();
        self.corners[1].x + s * (self.corners[2].x - self.corners[1].x)
    }

    /// Positive diagonal, from the bottom-left to the top-right corner.
    pub fn slanted_edge(&self) -> (Vec2, Vec2) {
        (self.corners[0], self.corners[2])
    }

    pub fn is_isosceles(&self, axis_x: f64) -> bool {
        let eps = eps_geom();
        ((self.corners[0].x + self.corners[1].x) * 0.5 - axis_x).abs() <= eps
            && ((self.corners[3].x + self.corners[2].x) * 0.5 - axis_x).abs() <= eps
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CylinderKind {
    /// Two trapezoids (possibly triangles).
    Typical,
    /// A single rectangle glued to itself.
    Exceptional,
    /// Three or more trapezoids; never occurs on a perfect surface.
    Irregular,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cylinder {
    /// Trapezoids in the order met walking rightwards around the cylinder.
    pub trapezoids: Vec<Trapezoid>,
    /// Translation taking trapezoid `i` from polygon coordinates into the
    /// unrolled strip, where the cylinder bottom is `v = 0` and trapezoid 0
    /// starts at `u = 0`.
    pub offsets: Vec<Vec2>,
    pub width: f64,
    pub height: f64,
    pub modulus: f64,
    pub kind: CylinderKind,
    /// Labels of the non-horizontal trapezoid sides.
    pub gluing_edges: Vec<Label>,
}

impl Cylinder {
    /// Slanted edges as `(polygon, bottom-left, top-right)`.
    pub fn slanted_edges(&self) -> Vec<(usize, Vec2, Vec2)> {
        self.trapezoids
            .iter()
            .map(|t| {
                let (a, b) = t.slanted_edge();
                (t.poly, a, b)
            })
            .collect()
    }

    pub fn area(&self) -> f64 {
        self.trapezoids.iter().map(Trapezoid::area).sum()
    }
}

/// Bands of one polygon, bottom to top.
fn polygon_bands(s: &Surface, p: usize) -> Result<Vec<Trapezoid>> {
    let poly = s.polygon(p);
    if !poly.is_level() {
        return Err(Error::NotLevel(p));
    }
    let levels = poly.levels();
    let eps = eps_geom();
    let mut bands = Vec::with_capacity(levels.len().saturating_sub(1));
    for b in 0..levels.len().saturating_sub(1) {
        let spans = |i: usize| {
            let (a, c) = poly.edge(i);
            cluster_index(&levels, a.y.min(c.y), eps) == Some(b)
        };
        let find = |side: Side| {
            (0..poly.edge_count())
                .find(|&i| poly.side(i) == side && spans(i))
                .ok_or_else(|| Error::Decomposition(format!("polygon {p} band {b} has no {side:?} edge")))
        };
        let left = find(Side::Left)?;
        let right = find(Side::Right)?;
        // left edges run downward, right edges upward
        let (lt, lb) = poly.edge(left);
        let (rb, rt) = poly.edge(right);
        bands.push(Trapezoid {
            poly: p,
            band: b,
            corners: [lb, rb, rt, lt],
            left: EdgeRef::new(p, left),
            right: EdgeRef::new(p, right),
        });
    }
    Ok(bands)
}

/// The canonical horizontal cylinder decomposition.
///
/// Bands are chained across the gluings of their non-horizontal sides;
/// horizontal edges only ever bound cylinders.
pub fn decompose(s: &Surface) -> Result<Vec<Cylinder>> {
    let eps = eps_geom();
    let bands: Vec<Vec<Trapezoid>> = (0..s.polygons().len())
        .map(|p| polygon_bands(s, p))
        .collect::<Result<_>>()?;
    let band_of = |e: EdgeRef| -> Result<usize> {
        bands[e.poly]
            .iter()
            .position(|t| t.left == e)
            .ok_or_else(|| Error::Decomposition(format!("{e} is not the left side of a band")))
    };

    let mut seen: Vec<Vec<bool>> = bands.iter().map(|b| vec![false; b.len()]).collect();
    let mut cylinders = Vec::new();
    for p in 0..bands.len() {
        for b in 0..bands[p].len() {
            if seen[p][b] {
                continue;
            }
            let first = &bands[p][b];
            let start_offset = Vec2::new(-first.corners[0].x, -first.corners[0].y);
            let mut trapezoids = Vec::new();
            let mut offsets = Vec::new();
            let (mut cp, mut cb, mut off) = (p, b, start_offset);
            loop {
                if seen[cp][cb] {
                    return Err(Error::Decomposition(format!(
                        "band {cb} of polygon {cp} reached twice"
                    )));
                }
                seen[cp][cb] = true;
                let t = bands[cp][cb].clone();
                if (t.bottom() + off.y).abs() > 1e3 * eps {
                    return Err(Error::Decomposition("bands of one cylinder at different heights".into()));
                }
                let r = t.right;
                trapezoids.push(t);
                offsets.push(off);
                let next = s.partner(r);
                off -= s.translation(r);
                let nb = band_of(next)?;
                if (next.poly, nb) == (p, b) {
                    break;
                }
                (cp, cb) = (next.poly, nb);
            }
            let closure = off - start_offset;
            let height = trapezoids[0].height();
            let width = trapezoids
                .iter()
                .map(|t| 0.5 * (t.bottom_width() + t.top_width()))
                .sum::<f64>();
            if closure.y.abs() > 1e3 * eps || (closure.x - width).abs() > 1e3 * eps {
                return Err(Error::Decomposition(format!(
                    "cylinder does not close up: holonomy {closure}, width {width}"
                )));
            }
            if trapezoids.iter().any(|t| (t.height() - height).abs() > 1e3 * eps) {
                return Err(Error::Decomposition("trapezoids of unequal height".into()));
            }
            let kind = match trapezoids.len() {
                1 => CylinderKind::Exceptional,
                2 => CylinderKind::Typical,
                _ => CylinderKind::Irregular,
            };
            let mut gluing_edges: Vec<Label> = Vec::new();
            for t in &trapezoids {
                let l = s.label(t.right);
                if !gluing_edges.contains(&l) {
                    gluing_edges.push(l);
                }
            }
            cylinders.push(Cylinder {
                trapezoids,
                offsets,
                width,
                height,
                modulus: width / height,
                kind,
                gluing_edges,
            });
        }
    }
    Ok(cylinders)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderModulus {
    pub modulus: f64,
    pub kind: CylinderKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerfectnessReport {
    pub is_perfect: bool,
    pub common_modulus: f64,
    pub cylinders: Vec<CylinderModulus>,
}

/// Classifies the cylinders and finds the common modulus `M`: typical
/// cylinders must have modulus `M`, exceptional ones `M / 2`.
pub fn perfectness(s: &Surface) -> Result<PerfectnessReport> {
    let cyls = decompose(s)?;
    Ok(perfectness_of(s, &cyls))
}

pub(crate) fn perfectness_of(s: &Surface, cyls: &[Cylinder]) -> PerfectnessReport {
    let eps = eps_geom();
    let scaled = |c: &Cylinder| match c.kind {
        CylinderKind::Exceptional => 2.0 * c.modulus,
        _ => c.modulus,
    };
    let common_modulus = cyls
        .iter()
        .find(|c| c.kind == CylinderKind::Typical)
        .or_else(|| cyls.first())
        .map(scaled)
        .unwrap_or(f64::NAN);
    let isosceles = cyls.iter().all(|c| {
        c.trapezoids
            .iter()
            .all(|t| t.is_isosceles(s.polygon(t.poly).axis_x()))
    });
    let exceptional_rectangles = cyls
        .iter()
        .filter(|c| c.kind == CylinderKind::Exceptional)
        .all(|c| {
            let t = &c.trapezoids[0];
            (t.bottom_width() - t.top_width()).abs() <= eps
        });
    let is_perfect = !cyls.is_empty()
        && isosceles
        && exceptional_rectangles
        && cyls.iter().all(|c| {
            c.kind != CylinderKind::Irregular && (scaled(c) - common_modulus).abs() <= eps
        });
    PerfectnessReport {
        is_perfect,
        common_modulus,
        cylinders: cyls
            .iter()
            .map(|c| CylinderModulus {
                modulus: c.modulus,
                kind: c.kind,
            })
            .collect(),
    }
}

/// Smallest angle between a slanted edge and the positive horizontal.
pub fn theta_s(s: &Surface) -> Result<f64> {
    Ok(theta_s_of(&decompose(s)?))
}

pub(crate) fn theta_s_of(cyls: &[Cylinder]) -> f64 {
    cyls.iter()
        .flat_map(|c| c.slanted_edges())
        .map(|(_, a, b)| (b - a).angle())
        .fold(f64::INFINITY, f64::min)
}
