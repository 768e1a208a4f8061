//! Polygons, gluings and the built-in surface families.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::vec2::Vec2;
use crate::{eps_geom, Error, Label, Result};

/// A directed polygon edge: edge `edge` of polygon `poly` runs from vertex
/// `edge` to vertex `edge + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeRef {
    pub poly: usize,
    pub edge: usize,
}

impl EdgeRef {
    pub const fn new(poly: usize, edge: usize) -> Self {
        EdgeRef { poly, edge }
    }
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}.e{}", self.poly, self.edge)
    }
}

/// A point of the surface, given in the coordinates of one polygon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub poly: usize,
    pub pos: Vec2,
}

impl SurfacePoint {
    pub const fn new(poly: usize, pos: Vec2) -> Self {
        SurfacePoint { poly, pos }
    }
}

impl fmt::Display for SurfacePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}@{}", self.pos.x, self.pos.y, self.poly)
    }
}

/// Parses the `x,y@poly` form written by `Display`.
impl std::str::FromStr for SurfacePoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("expected x,y@poly, got {s:?}"));
        let (xy, poly) = s.split_once('@').ok_or_else(bad)?;
        let (x, y) = xy.split_once(',').ok_or_else(bad)?;
        let num = |t: &str| t.trim().parse::<f64>().ok().filter(|v| v.is_finite());
        Ok(SurfacePoint::new(
            poly.trim().parse().map_err(|_| bad())?,
            Vec2::new(num(x).ok_or_else(bad)?, num(y).ok_or_else(bad)?),
        ))
    }
}

/// Which part of a level polygon an edge belongs to. Trajectories with a
/// small positive angle enter through `Left`/`Bottom` and leave through
/// `Right`/`Top`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

impl Side {
    pub fn is_horizontal(self) -> bool {
        matches!(self, Side::Bottom | Side::Top)
    }

    /// Sides a trajectory with direction angle in `(0, π/2)` leaves through.
    pub fn is_exit(self) -> bool {
        matches!(self, Side::Right | Side::Top)
    }
}

/// Groups nearly equal values; returns the sorted representatives.
pub(crate) fn cluster_values(values: impl IntoIterator<Item = f64>, eps: f64) -> Vec<f64> {
    let mut v: Vec<f64> = values.into_iter().collect();
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for x in v {
        match out.last() {
            Some(&last) if (x - last).abs() <= eps => {}
            _ => out.push(x),
        }
    }
    out
}

/// Index of the representative within `eps` of `y`.
pub(crate) fn cluster_index(levels: &[f64], y: f64, eps: f64) -> Option<usize> {
    let i = levels.partition_point(|&l| l < y - eps);
    (i < levels.len() && (levels[i] - y).abs() <= eps).then_some(i)
}

/// A convex polygon with counterclockwise vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<Vec2>,
    source_index: Vec<usize>,
}

impl Polygon {
    /// Builds a polygon from its edge vectors; vertex 0 sits at `start`.
    /// Each vector carries the index it had in the generating family, which
    /// survives dropping degenerate edges.
    pub fn from_edge_vectors(start: Vec2, edges: &[(usize, Vec2)]) -> Self {
        let mut vertices = Vec::with_capacity(edges.len());
        let mut p = start;
        for &(_, v) in edges {
            vertices.push(p);
            p += v;
        }
        Polygon {
            vertices,
            source_index: edges.iter().map(|&(i, _)| i).collect(),
        }
    }

    pub fn from_vertices(vertices: Vec<Vec2>) -> Self {
        let source_index = (0..vertices.len()).collect();
        Polygon {
            vertices,
            source_index,
        }
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, i: usize) -> Vec2 {
        self.vertices[i % self.vertices.len()]
    }

    /// Endpoints of edge `i`.
    pub fn edge(&self, i: usize) -> (Vec2, Vec2) {
        (self.vertex(i), self.vertex(i + 1))
    }

    pub fn edge_vector(&self, i: usize) -> Vec2 {
        let (a, b) = self.edge(i);
        b - a
    }

    pub fn edge_vectors(&self) -> Vec<Vec2> {
        (0..self.edge_count()).map(|i| self.edge_vector(i)).collect()
    }

    /// Index of edge `i` among the generating vectors `v_0, …, v_{2n-1}`.
    pub fn source_index(&self, i: usize) -> usize {
        self.source_index[i]
    }

    pub fn translated(&self, by: Vec2) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|&v| v + by).collect(),
            source_index: self.source_index.clone(),
        }
    }

    pub fn bbox(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo.x = lo.x.min(v.x);
            lo.y = lo.y.min(v.y);
            hi.x = hi.x.max(v.x);
            hi.y = hi.y.max(v.y);
        }
        (lo, hi)
    }

    /// x-coordinate of the vertical symmetry axis.
    pub fn axis_x(&self) -> f64 {
        let (lo, hi) = self.bbox();
        0.5 * (lo.x + hi.x)
    }

    /// Mirror image of `p` through the vertical symmetry axis.
    pub fn reflect(&self, p: Vec2) -> Vec2 {
        Vec2::new(2.0 * self.axis_x() - p.x, p.y)
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        0.5 * (0..n)
            .map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n]))
            .sum::<f64>()
    }

    pub fn centroid(&self) -> Vec2 {
        let n = self.vertices.len();
        let mut c = Vec2::ZERO;
        let mut a = 0.0;
        for i in 0..n {
            let (p, q) = (self.vertices[i], self.vertices[(i + 1) % n]);
            let w = p.cross(q);
            a += w;
            c += (p + q) * w;
        }
        c / (3.0 * a)
    }

    /// Signed distance from `p` to the boundary; positive inside.
    pub fn inner_distance(&self, p: Vec2) -> f64 {
        (0..self.edge_count())
            .map(|i| {
                let (a, b) = self.edge(i);
                let e = b - a;
                e.cross(p - a) / e.norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: Vec2, eps: f64) -> bool {
        self.inner_distance(p) >= -eps
    }

    pub fn side(&self, i: usize) -> Side {
        let v = self.edge_vector(i);
        if v.y.abs() <= eps_geom() {
            if v.x > 0.0 {
                Side::Bottom
            } else {
                Side::Top
            }
        } else if v.y > 0.0 {
            Side::Right
        } else {
            Side::Left
        }
    }

    /// Distinct vertex heights, bottom to top.
    pub fn levels(&self) -> Vec<f64> {
        cluster_values(self.vertices.iter().map(|v| v.y), eps_geom())
    }

    /// Index of the horizontal band an edge spans (for a horizontal edge,
    /// the index of its vertex level).
    pub fn edge_level(&self, i: usize) -> usize {
        let (a, b) = self.edge(i);
        let levels = self.levels();
        cluster_index(&levels, a.y.min(b.y), eps_geom()).expect("edge endpoints are vertices")
    }

    pub fn is_convex(&self) -> bool {
        let eps = eps_geom();
        let vs = self.edge_vectors();
        let n = vs.len();
        n >= 3
            && vs.iter().all(|v| v.norm() > eps)
            && (0..n).all(|i| vs[i].cross(vs[(i + 1) % n]) > -eps)
            && self.area() > 0.0
    }

    /// No horizontal line through a vertex meets the interior of an edge.
    pub fn is_level(&self) -> bool {
        let eps = eps_geom();
        self.vertices.iter().all(|v| {
            (0..self.edge_count()).all(|i| {
                let (a, b) = self.edge(i);
                let (lo, hi) = (a.y.min(b.y), a.y.max(b.y));
                !(v.y > lo + eps && v.y < hi - eps)
            })
        })
    }

    pub fn is_vertically_symmetric(&self) -> bool {
        let eps = eps_geom();
        self.vertices.iter().all(|&v| {
            let r = self.reflect(v);
            self.vertices.iter().any(|&w| w.dist(r) <= eps)
        })
    }

    /// The edge that the vertical reflection maps edge `i` onto.
    pub fn reflected_edge(&self, i: usize) -> Option<usize> {
        let eps = eps_geom();
        let (a, b) = self.edge(i);
        let (ra, rb) = (self.reflect(a), self.reflect(b));
        (0..self.edge_count()).find(|&j| {
            let (c, d) = self.edge(j);
            c.dist(rb) <= eps && d.dist(ra) <= eps
        })
    }
}

/// Edge vectors of the semi-regular polygon `P_n(a, b)`.
fn semi_regular_vectors(n: usize, a: f64, b: f64) -> Vec<(usize, Vec2)> {
    (0..2 * n)
        .filter_map(|i| {
            let len = if i % 2 == 0 { a } else { b };
            let v = Vec2::from_angle(i as f64 * PI / n as f64) * len;
            (len.abs() > eps_geom()).then_some((i, v))
        })
        .collect()
}

/// The `(a, b)` semi-regular `2n`-gon.
///
/// Zero-length edges are dropped, so one vanishing parameter leaves a regular
/// `n`-gon. Vertex 0 is at the origin; it is the left end of the bottom edge
/// when `a > 0` and the bottom vertex otherwise.
pub fn semi_regular_polygon(n: usize, a: f64, b: f64) -> Result<Polygon> {
    if n < 3 {
        return Err(Error::InvalidParams(format!("n = {n}, need n >= 3")));
    }
    if !(a.is_finite() && b.is_finite()) || a < 0.0 || b < 0.0 {
        return Err(Error::InvalidParams(format!(
            "a = {a}, b = {b} must be non-negative"
        )));
    }
    if a <= eps_geom() && b <= eps_geom() {
        return Err(Error::InvalidParams("a and b are both zero".into()));
    }
    Ok(Polygon::from_edge_vectors(
        Vec2::ZERO,
        &semi_regular_vectors(n, a, b),
    ))
}

/// How a surface was constructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    RegularSingle { n: usize },
    RegularDouble { n: usize },
    BouwMoller { m: usize, n: usize },
    Custom,
}

impl Family {
    pub fn is_regular(self) -> bool {
        matches!(self, Family::RegularSingle { .. } | Family::RegularDouble { .. })
    }

    pub fn name(self) -> String {
        match self {
            Family::RegularSingle { n } => format!("regular {n}-gon"),
            Family::RegularDouble { n } => format!("double regular {n}-gon"),
            Family::BouwMoller { m, n } => format!("({m},{n}) Bouw-Möller"),
            Family::Custom => "custom".into(),
        }
    }
}

/// Polygons with an edge pairing; immutable after construction.
#[derive(Clone, Debug)]
pub struct Surface {
    polygons: Vec<Polygon>,
    partner: Vec<Vec<EdgeRef>>,
    labels: Vec<Vec<Label>>,
    family: Family,
}

impl Surface {
    /// Glues `polygons` along `pairs` and assigns canonical labels.
    ///
    /// Labels are numbered from 1 in order of first appearance, walking the
    /// polygons in order and, within a polygon, the edges from bottom to top
    /// and right before left.
    pub fn new(polygons: Vec<Polygon>, pairs: &[(EdgeRef, EdgeRef)], family: Family) -> Result<Self> {
        let mut partner: Vec<Vec<Option<EdgeRef>>> =
            polygons.iter().map(|p| vec![None; p.edge_count()]).collect();
        for &(e, f) in pairs {
            for r in [e, f] {
                if r.poly >= polygons.len() || r.edge >= polygons[r.poly].edge_count() {
                    return Err(Error::InvalidGluing(format!("no edge {r}")));
                }
            }
            if e == f {
                return Err(Error::InvalidGluing(format!("{e} glued to itself")));
            }
            for (x, y) in [(e, f), (f, e)] {
                if partner[x.poly][x.edge].replace(y).is_some() {
                    return Err(Error::InvalidGluing(format!("{x} appears in two pairs")));
                }
            }
        }
        let partner: Vec<Vec<EdgeRef>> = partner
            .into_iter()
            .enumerate()
            .map(|(p, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(i, e)| {
                        e.ok_or_else(|| Error::InvalidGluing(format!("{} is unglued", EdgeRef::new(p, i))))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;

        let eps = eps_geom();
        let mut labels: Vec<Vec<Option<Label>>> =
            polygons.iter().map(|p| vec![None; p.edge_count()]).collect();
        let mut next = 1;
        for (p, poly) in polygons.iter().enumerate() {
            let mids: Vec<Vec2> = (0..poly.edge_count())
                .map(|i| {
                    let (a, b) = poly.edge(i);
                    (a + b) * 0.5
                })
                .collect();
            let heights = cluster_values(mids.iter().map(|m| m.y), eps);
            let mut order: Vec<usize> = (0..poly.edge_count()).collect();
            order.sort_by(|&i, &j| {
                let li = cluster_index(&heights, mids[i].y, eps);
                let lj = cluster_index(&heights, mids[j].y, eps);
                li.cmp(&lj).then(mids[j].x.total_cmp(&mids[i].x))
            });
            for i in order {
                if labels[p][i].is_none() {
                    let q = partner[p][i];
                    labels[p][i] = Some(Label(next));
                    labels[q.poly][q.edge] = Some(Label(next));
                    next += 1;
                }
            }
        }
        let labels = labels
            .into_iter()
            .map(|row| row.into_iter().map(|l| l.expect("every edge is paired")).collect())
            .collect();
        Ok(Surface {
            polygons,
            partner,
            labels,
            family,
        })
    }

    pub fn polygons(&self) -> &[Polygon] {
        &self.polygons
    }

    pub fn polygon(&self, i: usize) -> &Polygon {
        &self.polygons[i]
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeRef> + '_ {
        self.polygons
            .iter()
            .enumerate()
            .flat_map(|(p, poly)| (0..poly.edge_count()).map(move |i| EdgeRef::new(p, i)))
    }

    pub fn edge_count(&self) -> usize {
        self.polygons.iter().map(Polygon::edge_count).sum()
    }

    pub fn partner(&self, e: EdgeRef) -> EdgeRef {
        self.partner[e.poly][e.edge]
    }

    pub fn label(&self, e: EdgeRef) -> Label {
        self.labels[e.poly][e.edge]
    }

    /// All labels in increasing order.
    pub fn labels(&self) -> Vec<Label> {
        let mut v: Vec<Label> = self.labels.iter().flatten().copied().collect();
        v.sort();
        v.dedup();
        v
    }

    /// The two polygon edges carrying `label`.
    pub fn edges_with_label(&self, label: Label) -> Vec<EdgeRef> {
        self.edges().filter(|&e| self.label(e) == label).collect()
    }

    pub fn segment(&self, e: EdgeRef) -> (Vec2, Vec2) {
        self.polygons[e.poly].edge(e.edge)
    }

    pub fn side(&self, e: EdgeRef) -> Side {
        self.polygons[e.poly].side(e.edge)
    }

    /// Translation carrying edge `e` onto its partner: a point `x` on `e` is
    /// identified with `x + translation(e)` on `partner(e)`.
    pub fn translation(&self, e: EdgeRef) -> Vec2 {
        let (a, _) = self.segment(e);
        let (_, d) = self.segment(self.partner(e));
        d - a
    }

    /// The occurrence of `label` that trajectories with small positive
    /// angle cross into (a left or bottom edge).
    pub fn entry_edge(&self, label: Label) -> Option<EdgeRef> {
        self.edges()
            .find(|&e| self.label(e) == label && !self.side(e).is_exit())
    }

    /// The occurrence of `label` such trajectories leave through.
    pub fn exit_edge(&self, label: Label) -> Option<EdgeRef> {
        self.edges()
            .find(|&e| self.label(e) == label && self.side(e).is_exit())
    }

    pub fn total_area(&self) -> f64 {
        self.polygons.iter().map(Polygon::area).sum()
    }

    /// Whether two points represent the same point of the surface, allowing
    /// for the identification along glued edges.
    pub fn same_point(&self, a: SurfacePoint, b: SurfacePoint, tol: f64) -> bool {
        if a.poly == b.poly && a.pos.dist(b.pos) <= tol {
            return true;
        }
        // a point on an edge also lives on the partner edge
        self.images_on_edges(a)
            .any(|img| img.poly == b.poly && img.pos.dist(b.pos) <= tol)
    }

    fn images_on_edges(&self, p: SurfacePoint) -> impl Iterator<Item = SurfacePoint> + '_ {
        let poly = &self.polygons[p.poly];
        let tol = 1e3 * eps_geom();
        (0..poly.edge_count()).filter_map(move |i| {
            let (a, b) = poly.edge(i);
            let e = b - a;
            let s = (p.pos - a).dot(e) / e.dot(e);
            let off = e.cross(p.pos - a).abs() / e.norm();
            (off <= tol && (-1e-12..=1.0 + 1e-12).contains(&s)).then(|| {
                let r = EdgeRef::new(p.poly, i);
                SurfacePoint::new(self.partner(r).poly, p.pos + self.translation(r))
            })
        })
    }

    /// Polygon containing `p` in its own coordinates; used to resolve
    /// points given with a wrong polygon index.
    pub fn locate(&self, p: SurfacePoint) -> Option<SurfacePoint> {
        let poly = self.polygons.get(p.poly)?;
        poly.contains(p.pos, eps_geom()).then_some(p)
    }
}

/// Per-polygon outcome of the special-polygon checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonCheck {
    pub polygon: usize,
    pub convex: bool,
    pub level: bool,
    pub vertically_symmetric: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub polygons: Vec<PolygonCheck>,
    /// Paired edges are antiparallel translates of each other.
    pub gluing_translations: bool,
    /// Both edges of every pair carry the same label, used exactly twice.
    pub labels_consistent: bool,
    /// Reflecting each polygon maps glued pairs to glued pairs.
    pub gluing_symmetric: bool,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that every polygon is convex, level and vertically symmetric and
/// that the gluing is a symmetric translation pairing.
pub fn validate_special(s: &Surface) -> ValidationReport {
    let eps = eps_geom();
    let mut failures = Vec::new();
    let polygons: Vec<PolygonCheck> = s
        .polygons()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let c = PolygonCheck {
                polygon: i,
                convex: p.is_convex(),
                level: p.is_level(),
                vertically_symmetric: p.is_vertically_symmetric(),
            };
            if !c.convex {
                failures.push(format!("polygon {i} is not convex"));
            }
            if !c.level {
                failures.push(format!("polygon {i} is not level"));
            }
            if !c.vertically_symmetric {
                failures.push(format!("polygon {i} is not vertically symmetric"));
            }
            c
        })
        .collect();

    let mut gluing_translations = true;
    let mut labels_consistent = true;
    let mut gluing_symmetric = true;
    let mut label_uses: HashMap<Label, usize> = HashMap::new();
    for e in s.edges() {
        *label_uses.entry(s.label(e)).or_default() += 1;
        let f = s.partner(e);
        if s.partner(f) != e || f == e {
            gluing_translations = false;
            failures.push(format!("gluing is not an involution at {e}"));
            continue;
        }
        let (a, b) = s.segment(e);
        let (c, d) = s.segment(f);
        if ((b - a) + (d - c)).norm() > eps {
            gluing_translations = false;
            failures.push(format!("{e} and {f} are not antiparallel translates"));
        }
        if s.label(e) != s.label(f) {
            labels_consistent = false;
            failures.push(format!("{e} and {f} carry different labels"));
        }
        let pe = s.polygon(e.poly);
        let pf = s.polygon(f.poly);
        match (pe.reflected_edge(e.edge), pf.reflected_edge(f.edge)) {
            (Some(ie), Some(jf)) => {
                if s.partner(EdgeRef::new(e.poly, ie)) != EdgeRef::new(f.poly, jf) {
                    gluing_symmetric = false;
                    failures.push(format!("reflection does not preserve the pair ({e}, {f})"));
                }
            }
            _ => {
                gluing_symmetric = false;
                failures.push(format!("reflection of {e} or {f} is not an edge"));
            }
        }
    }
    if label_uses.values().any(|&k| k != 2) {
        labels_consistent = false;
        failures.push("some label is not used exactly twice".into());
    }
    failures.dedup();
    ValidationReport {
        polygons,
        gluing_translations,
        labels_consistent,
        gluing_symmetric,
        failures,
    }
}

/// Pairs every edge of `p` listed in `edges` with the antiparallel edge of
/// equal length in polygon `q`.
fn antiparallel_pairs(
    polys: &[Polygon],
    p: usize,
    edges: impl IntoIterator<Item = usize>,
    q: usize,
) -> Result<Vec<(EdgeRef, EdgeRef)>> {
    let eps = 1e3 * eps_geom();
    edges
        .into_iter()
        .map(|i| {
            let v = polys[p].edge_vector(i);
            (0..polys[q].edge_count())
                .find(|&j| (polys[q].edge_vector(j) + v).norm() <= eps && (p, i) != (q, j))
                .map(|j| (EdgeRef::new(p, i), EdgeRef::new(q, j)))
                .ok_or_else(|| {
                    Error::InvalidGluing(format!(
                        "edge {} has no antiparallel partner in polygon {q}",
                        EdgeRef::new(p, i)
                    ))
                })
        })
        .collect()
}

/// Lays the polygons out left to right, vertically centred, with a gap.
fn lay_out(polys: Vec<Polygon>) -> Vec<Polygon> {
    let width = polys
        .iter()
        .map(|p| {
            let (lo, hi) = p.bbox();
            hi.x - lo.x
        })
        .fold(0.0, f64::max);
    let gap = 0.25 * width;
    let mut x = 0.0;
    polys
        .into_iter()
        .map(|p| {
            let (lo, hi) = p.bbox();
            let placed = p.translated(Vec2::new(x - lo.x, -0.5 * (lo.y + hi.y)));
            x += hi.x - lo.x + gap;
            placed
        })
        .collect()
}

fn regular_vectors(n: usize) -> Vec<(usize, Vec2)> {
    (0..n)
        .map(|i| (i, Vec2::from_angle(2.0 * PI * i as f64 / n as f64)))
        .collect()
}

/// The regular `n`-gon surface with unit edges and a horizontal bottom edge.
///
/// A single polygon glues opposite edges and needs `n` even; the double
/// surface glues each edge of the polygon to the parallel edge of its point
/// reflection.
pub fn build_regular_surface(n: usize, doubled: bool) -> Result<Surface> {
    if n < 3 {
        return Err(Error::InvalidParams(format!("n = {n}, need n >= 3")));
    }
    let base = Polygon::from_edge_vectors(Vec2::ZERO, &regular_vectors(n));
    if !doubled {
        if n % 2 == 1 {
            return Err(Error::OddSingle(n));
        }
        let polys = lay_out(vec![base]);
        let pairs: Vec<(EdgeRef, EdgeRef)> = (0..n / 2)
            .map(|i| (EdgeRef::new(0, i), EdgeRef::new(0, i + n / 2)))
            .collect();
        return Surface::new(polys, &pairs, Family::RegularSingle { n });
    }
    // the reflected copy, walked from its top edge so vectors stay in step
    let flipped: Vec<(usize, Vec2)> = regular_vectors(n).into_iter().map(|(i, v)| (i, -v)).collect();
    let mirror = Polygon::from_edge_vectors(Vec2::ZERO, &flipped);
    let polys = lay_out(vec![base, mirror]);
    let pairs = antiparallel_pairs(&polys, 0, 0..n, 1)?;
    Surface::new(polys, &pairs, Family::RegularDouble { n })
}

/// Parameters `(a, b)` of polygon `P(k)` of the `(m, n)` Bouw-Möller surface.
///
/// The case split is on the parity of `n`; with it, the rule "for odd `k`,
/// even edges of `P(k)` glue to `P(k+1)` and odd edges to `P(k-1)`" always
/// pairs edges of equal length.
pub fn bouw_moller_params(m: usize, n: usize, k: usize) -> (f64, f64) {
    let s = |j: usize| {
        if j == 0 || j == m {
            0.0
        } else {
            (j as f64 * PI / m as f64).sin()
        }
    };
    if n % 2 == 1 || k % 2 == 1 {
        (s(k + 1), s(k))
    } else {
        (s(k), s(k + 1))
    }
}

/// The `(m, n)` Bouw-Möller surface built from `m` semi-regular polygons.
pub fn build_bouw_moller(m: usize, n: usize) -> Result<Surface> {
    if m < 2 || n < 3 {
        return Err(Error::InvalidParams(format!(
            "(m, n) = ({m}, {n}), need m >= 2 and n >= 3"
        )));
    }
    let polys = (0..m)
        .map(|k| {
            let (a, b) = bouw_moller_params(m, n, k);
            semi_regular_polygon(n, a, b)
        })
        .collect::<Result<Vec<_>>>()?;
    let polys = lay_out(polys);
    let mut pairs = Vec::new();
    for k in 0..m - 1 {
        // the odd member of the pair (k, k+1) decides which parity is shared
        let (odd, other) = if k % 2 == 1 { (k, k + 1) } else { (k + 1, k) };
        let parity = if odd == k { 0 } else { 1 };
        let shared: Vec<usize> = (0..polys[odd].edge_count())
            .filter(|&i| polys[odd].source_index(i) % 2 == parity)
            .collect();
        pairs.extend(antiparallel_pairs(&polys, odd, shared, other)?);
    }
    Surface::new(polys, &pairs, Family::BouwMoller { m, n })
}

/// The square torus with unit side.
pub fn square_torus() -> Surface {
    let sq = Polygon::from_vertices(vec![
        Vec2::new(0.0, 0.0),
        Vec2::new(1.0, 0.0),
        Vec2::new(1.0, 1.0),
        Vec2::new(0.0, 1.0),
    ]);
    Surface::new(
        vec![sq],
        &[
            (EdgeRef::new(0, 0), EdgeRef::new(0, 2)),
            (EdgeRef::new(0, 1), EdgeRef::new(0, 3)),
        ],
        Family::Custom,
    )
    .expect("square torus gluing is valid")
}
