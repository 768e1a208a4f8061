//! JSON documents for surfaces, cylinder reports and word tables.

use serde::{Deserialize, Serialize};

use crate::cylinders::{Cylinder, CylinderKind, PerfectnessReport};
use crate::derivation::Word3;
use crate::geometry::{EdgeRef, Family, Polygon, Surface};
use crate::vec2::Vec2;
use crate::{Error, Label, Result};

pub const SURFACE_FORMAT: &str = "flatsurf-v1";

/// Pretty JSON with a trailing newline; field order is fixed by the types.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn surface_from_json(text: &str) -> Result<Surface> {
    let doc: SurfaceDoc =
        serde_json::from_str(text).map_err(|e| Error::InvalidParams(format!("bad surface JSON: {e}")))?;
    doc.to_surface()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub polygon: usize,
    pub edge: usize,
    pub label: Label,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDoc {
    pub format: String,
    pub family: Family,
    pub polygons: Vec<Vec<[f64; 2]>>,
    pub edges: Vec<EdgeEntry>,
    pub gluings: Vec<[EdgeRef; 2]>,
}

impl SurfaceDoc {
    pub fn new(s: &Surface) -> Self {
        let polygons = s
            .polygons()
            .iter()
            .map(|p| p.vertices().iter().map(|v| [v.x, v.y]).collect())
            .collect();
        let edges = s
            .edges()
            .map(|e| EdgeEntry {
                polygon: e.poly,
                edge: e.edge,
                label: s.label(e),
            })
            .collect();
        let gluings = s
            .edges()
            .filter(|e| *e < s.partner(*e))
            .map(|e| [e, s.partner(e)])
            .collect();
        SurfaceDoc {
            format: SURFACE_FORMAT.into(),
            family: s.family(),
            polygons,
            edges,
            gluings,
        }
    }

    /// Rebuilds the surface; labels are reassigned canonically and must
    /// agree with the stored ones.
    pub fn to_surface(&self) -> Result<Surface> {
        if self.format != SURFACE_FORMAT {
            return Err(Error::InvalidParams(format!("unknown format {:?}", self.format)));
        }
        let polygons = self
            .polygons
            .iter()
            .map(|vs| Polygon::from_vertices(vs.iter().map(|v| Vec2::new(v[0], v[1])).collect()))
            .collect();
        let pairs: Vec<(EdgeRef, EdgeRef)> = self.gluings.iter().map(|g| (g[0], g[1])).collect();
        let s = Surface::new(polygons, &pairs, self.family)?;
        for e in &self.edges {
            let r = EdgeRef::new(e.polygon, e.edge);
            if r.poly >= s.polygons().len() || r.edge >= s.polygon(r.poly).edge_count() || s.label(r) != e.label {
                return Err(Error::InvalidGluing(format!("label of {r} does not match")));
            }
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderEntry {
    pub width: f64,
    pub height: f64,
    pub modulus: f64,
    pub kind: CylinderKind,
    pub labels: Vec<Label>,
    pub polygons: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderDoc {
    pub family: Family,
    pub perfect: bool,
    pub common_modulus: f64,
    pub theta_s: f64,
    pub cylinders: Vec<CylinderEntry>,
}

impl CylinderDoc {
    pub fn new(s: &Surface, cyls: &[Cylinder], report: &PerfectnessReport, theta_s: f64) -> Self {
        CylinderDoc {
            family: s.family(),
            perfect: report.is_perfect,
            common_modulus: report.common_modulus,
            theta_s,
            cylinders: cyls
                .iter()
                .map(|c| CylinderEntry {
                    width: c.width,
                    height: c.height,
                    modulus: c.modulus,
                    kind: c.kind,
                    labels: c.gluing_edges.clone(),
                    polygons: c.trapezoids.iter().map(|t| t.poly).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordEntry {
    pub word: String,
    pub labels: [Label; 3],
    #[serde(rename = "type")]
    pub kind: String,
    pub kept: bool,
    pub sandwiched: bool,
}

impl From<&Word3> for WordEntry {
    fn from(w: &Word3) -> Self {
        WordEntry {
            word: w.text(),
            labels: w.labels,
            kind: w.type_name(),
            kept: w.kept,
            sandwiched: w.labels[0] == w.labels[2],
        }
    }
}

/// Words sorted by type, then verdict, then text.
pub fn word_table(words: &[Word3]) -> Vec<WordEntry> {
    let mut v: Vec<WordEntry> = words.iter().map(WordEntry::from).collect();
    v.sort_by(|a, b| {
        a.kind
            .cmp(&b.kind)
            .then(b.kept.cmp(&a.kept))
            .then(a.word.cmp(&b.word))
    });
    v
}

/// Aligned text version of [`word_table`].
pub fn word_table_text(words: &[Word3]) -> String {
    let mut out = String::from("word   type  verdict  sandwiched\n");
    for w in word_table(words) {
        out.push_str(&format!(
            "{:<6} {:<5} {:<8} {}\n",
            w.word,
            w.kind,
            if w.kept { "kept" } else { "removed" },
            if w.sandwiched { "yes" } else { "no" }
        ));
    }
    out
}
