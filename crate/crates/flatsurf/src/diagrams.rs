//! Transition diagrams: which label can follow which for directions in the
//! sector `[0, θ_s)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use petgraph::algo::isomorphism::is_isomorphic_matching;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::cylinders::{decompose, theta_s_of};
use crate::geometry::{EdgeRef, Surface};
use crate::vec2::Vec2;
use crate::{Label, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arrow {
    pub from: Label,
    pub to: Label,
    /// Polygon in which the transition happens.
    pub poly: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionDiagram {
    pub nodes: Vec<Label>,
    pub arrows: Vec<Arrow>,
    pub theta_s: f64,
}

impl TransitionDiagram {
    pub fn has_arrow(&self, from: Label, to: Label) -> bool {
        self.arrow(from, to).is_some()
    }

    pub fn arrow(&self, from: Label, to: Label) -> Option<&Arrow> {
        self.arrows.iter().find(|a| a.from == from && a.to == to)
    }

    pub fn successors(&self, from: Label) -> impl Iterator<Item = Label> + '_ {
        self.arrows.iter().filter(move |a| a.from == from).map(|a| a.to)
    }

    pub fn graph(&self) -> DiGraph<Label, ()> {
        let mut g = DiGraph::new();
        let idx: BTreeMap<Label, _> = self.nodes.iter().map(|&l| (l, g.add_node(l))).collect();
        for a in &self.arrows {
            g.add_edge(idx[&a.from], idx[&a.to], ());
        }
        g
    }

    /// Graphviz source. Each inner slice of `rows` is put on one rank.
    pub fn to_dot(&self, rows: Option<&[Vec<Label>]>) -> String {
        let mut out = String::from("digraph transitions {\n  node [shape=circle];\n");
        for l in &self.nodes {
            let _ = writeln!(out, "  {l};");
        }
        if let Some(rows) = rows {
            for row in rows {
                let names: Vec<String> = row.iter().map(|l| l.to_string()).collect();
                let _ = writeln!(out, "  {{ rank=same; {}; }}", names.join("; "));
            }
            // invisible chains keep the columns ordered within a rank
            for row in rows {
                if row.len() > 1 {
                    let names: Vec<String> = row.iter().map(|l| l.to_string()).collect();
                    let _ = writeln!(out, "  {} [style=invis];", names.join(" -> "));
                }
            }
        }
        let mut done = BTreeSet::new();
        for a in &self.arrows {
            if done.contains(&(a.from, a.to)) {
                continue;
            }
            if a.from != a.to && self.has_arrow(a.to, a.from) {
                done.insert((a.to, a.from));
                let _ = writeln!(out, "  {} -> {} [dir=both];", a.from, a.to);
            } else {
                let _ = writeln!(out, "  {} -> {};", a.from, a.to);
            }
            done.insert((a.from, a.to));
        }
        out.push_str("}\n");
        out
    }
}

/// Range of direction angles `(lo, hi)` of vectors `q - p` with `p` on the
/// segment `e1` and `q` on `e2`.
fn angle_range(e1: (Vec2, Vec2), e2: (Vec2, Vec2)) -> Option<(f64, f64)> {
    let corners: Vec<Vec2> = [e2.0, e2.1]
        .iter()
        .flat_map(|&q| [e1.0, e1.1].map(|p| q - p))
        .filter(|v| v.norm() > 1e-12)
        .collect();
    let reference = corners.iter().fold(Vec2::ZERO, |acc, v| acc + *v / v.norm());
    if reference.norm() < 1e-12 {
        return None;
    }
    let r = reference.angle();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in &corners {
        let rel = Vec2::new(v.dot(reference), reference.cross(*v)).angle();
        lo = lo.min(rel);
        hi = hi.max(rel);
    }
    Some((r + lo, r + hi))
}

/// Builds the diagram by exact visibility inside each polygon.
pub fn transition_diagram(s: &Surface) -> Result<TransitionDiagram> {
    let cyls = decompose(s)?;
    let theta_s = theta_s_of(&cyls);
    let tol = 1e-9;
    let mut arrows = BTreeSet::new();
    for (q, poly) in s.polygons().iter().enumerate() {
        let edges: Vec<EdgeRef> = (0..poly.edge_count()).map(|i| EdgeRef::new(q, i)).collect();
        for &e1 in edges.iter().filter(|e| !s.side(**e).is_exit()) {
            for &e2 in edges.iter().filter(|e| s.side(**e).is_exit()) {
                let Some((lo, hi)) = angle_range(s.segment(e1), s.segment(e2)) else {
                    continue;
                };
                if hi > tol && lo < theta_s - tol {
                    arrows.insert(Arrow {
                        from: s.label(e1),
                        to: s.label(e2),
                        poly: q,
                    });
                }
            }
        }
    }
    Ok(TransitionDiagram {
        nodes: s.labels(),
        arrows: arrows.into_iter().collect(),
        theta_s,
    })
}

/// Outcome of comparing a diagram with the grid pattern.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub passed: bool,
    pub rows: usize,
    pub cols: usize,
    /// Label at each grid cell, row by row, when the check passed.
    pub grid: Option<Vec<Vec<Label>>>,
    pub failure: Option<String>,
}

/// A grid cell `(row, column)`.
pub type Cell = (usize, usize);
pub type CellArrow = (Cell, Cell);

/// The expected diagram on a `rows × cols` grid of cells `(r, c)`.
///
/// Within a row, links alternate between two-way ones, where `r + c + cols`
/// is even, and one-way ones. One-way links only exist in the first row,
/// pointing to increasing `c`, and in the last row, pointing to increasing
/// `c` when its index is odd and to decreasing `c` otherwise. With a single
/// row both apply. Column `c` points down when `c + cols` is even and up
/// otherwise.
pub fn grid_template(rows: usize, cols: usize) -> Vec<CellArrow> {
    let mut arrows = BTreeSet::new();
    for r in 0..rows {
        for c in 0..cols.saturating_sub(1) {
            let (left, right) = ((r, c), (r, c + 1));
            if (r + c + cols).is_multiple_of(2) {
                arrows.insert((left, right));
                arrows.insert((right, left));
                continue;
            }
            if r == 0 {
                arrows.insert((left, right));
            }
            if r + 1 == rows {
                if !r.is_multiple_of(2) {
                    arrows.insert((left, right));
                } else {
                    arrows.insert((right, left));
                }
            }
        }
    }
    for r in 0..rows.saturating_sub(1) {
        for c in 0..cols {
            if (c + cols).is_multiple_of(2) {
                arrows.insert(((r, c), (r + 1, c)));
            } else {
                arrows.insert(((r + 1, c), (r, c)));
            }
        }
    }
    arrows.into_iter().collect()
}

/// Checks `d` against the `(m - 1) × n` grid pattern, up to relabeling.
pub fn check_grid_shape(d: &TransitionDiagram, m: usize, n: usize) -> ShapeReport {
    let rows = m.saturating_sub(1);
    let fail = |msg: String| ShapeReport {
        passed: false,
        rows,
        cols: n,
        grid: None,
        failure: Some(msg),
    };
    if rows == 0 || n == 0 {
        return fail(format!("no grid for m = {m}, n = {n}"));
    }
    if d.nodes.len() != rows * n {
        return fail(format!("{} labels, grid has {} cells", d.nodes.len(), rows * n));
    }
    let mut template = DiGraph::<(usize, usize), ()>::new();
    let mut cell = BTreeMap::new();
    for r in 0..rows {
        for c in 0..n {
            cell.insert((r, c), template.add_node((r, c)));
        }
    }
    let tarrows = grid_template(rows, n);
    for (a, b) in &tarrows {
        template.add_edge(cell[a], cell[b], ());
    }
    let g = d.graph();
    let arrow_count: BTreeSet<_> = d.arrows.iter().map(|a| (a.from, a.to)).collect();
    if arrow_count.len() != tarrows.len() {
        return fail(format!(
            "{} arrows, grid pattern has {}",
            arrow_count.len(),
            tarrows.len()
        ));
    }
    if !is_isomorphic_matching(&template, &g, |_, _| true, |_, _| true) {
        return fail("diagram is not isomorphic to the grid pattern".into());
    }
    match grid_witness(d, &tarrows, rows, n) {
        Some(grid) => ShapeReport {
            passed: true,
            rows,
            cols: n,
            grid: Some(grid),
            failure: None,
        },
        None => fail("isomorphic, but no witness placement was found".into()),
    }
}

/// Finds an explicit placement of labels on grid cells that maps template
/// arrows exactly onto diagram arrows, by backtracking in row-major order.
fn grid_witness(
    d: &TransitionDiagram,
    tarrows: &[CellArrow],
    rows: usize,
    cols: usize,
) -> Option<Vec<Vec<Label>>> {
    let has: BTreeSet<(Label, Label)> = d.arrows.iter().map(|a| (a.from, a.to)).collect();
    let tset: BTreeSet<_> = tarrows.iter().copied().collect();
    let cells: Vec<(usize, usize)> = (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).collect();
    let mut placed: BTreeMap<(usize, usize), Label> = BTreeMap::new();
    let mut used = BTreeSet::new();

    fn consistent(
        cellx: (usize, usize),
        l: Label,
        placed: &BTreeMap<(usize, usize), Label>,
        has: &BTreeSet<(Label, Label)>,
        tset: &BTreeSet<CellArrow>,
    ) -> bool {
        placed.iter().all(|(&other, &m)| {
            tset.contains(&(cellx, other)) == has.contains(&(l, m))
                && tset.contains(&(other, cellx)) == has.contains(&(m, l))
        }) && tset.contains(&(cellx, cellx)) == has.contains(&(l, l))
    }

    fn go(
        k: usize,
        cells: &[(usize, usize)],
        nodes: &[Label],
        placed: &mut BTreeMap<(usize, usize), Label>,
        used: &mut BTreeSet<Label>,
        has: &BTreeSet<(Label, Label)>,
        tset: &BTreeSet<CellArrow>,
    ) -> bool {
        if k == cells.len() {
            return true;
        }
        for &l in nodes {
            if used.contains(&l) || !consistent(cells[k], l, placed, has, tset) {
                continue;
            }
            placed.insert(cells[k], l);
            used.insert(l);
            if go(k + 1, cells, nodes, placed, used, has, tset) {
                return true;
            }
            placed.remove(&cells[k]);
            used.remove(&l);
        }
        false
    }

    if !go(0, &cells, &d.nodes, &mut placed, &mut used, &has, &tset) {
        return None;
    }
    Some(
        (0..rows)
            .map(|r| (0..cols).map(|c| placed[&(r, c)]).collect())
            .collect(),
    )
}
