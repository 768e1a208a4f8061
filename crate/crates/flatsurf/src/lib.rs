//! Perfect translation surfaces and the flip-shear action on cutting sequences.
//!
//! The crate builds regular polygon surfaces and Bouw-Möller surfaces from
//! their polygon decompositions, computes the horizontal cylinder
//! decomposition, flows straight-line trajectories to get cutting sequences,
//! and implements the flip-shear `V_M = S_M ∘ R` both as a point map on the
//! surface and as a combinatorial rule on cutting sequences. The two are
//! checked against each other by [`verify`].
//!
//! All geometric predicates share one absolute tolerance, [`eps_geom`].

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod automorphisms;
pub mod cylinders;
pub mod derivation;
pub mod diagrams;
pub mod export;
pub mod flow;
pub mod geometry;
pub mod oracle;
pub mod sampling;
pub mod svg;
pub mod vec2;
pub mod verify;

pub use automorphisms::{flip_point, flip_shear_direction, flip_shear_point, shear_point, Charts};
pub use cylinders::{decompose, perfectness, theta_s, Cylinder, CylinderKind, PerfectnessReport};
pub use derivation::{derive_combinatorial, enumerate_words, sandwich_derive, transition_type, Word3};
pub use diagrams::{check_grid_shape, transition_diagram, ShapeReport, TransitionDiagram};
pub use flow::{flow, CuttingSequence, Crossing, Trajectory};
pub use geometry::{
    build_bouw_moller, build_regular_surface, semi_regular_polygon, validate_special, EdgeRef,
    Family, Polygon, Surface, SurfacePoint, ValidationReport,
};
pub use vec2::Vec2;

/// Default absolute tolerance for parallelism, symmetry and level tests.
pub const DEFAULT_EPS_GEOM: f64 = 1e-9;

/// Distance from a vertex under which a crossing counts as hitting it.
pub const EPS_HIT: f64 = 1e-9;

/// Absolute tolerance for geometric predicates.
///
/// `FLATSURF_EPS` overrides the default; it is read once per process and is
/// meant for testing only.
pub fn eps_geom() -> f64 {
    static EPS: OnceLock<f64> = OnceLock::new();
    *EPS.get_or_init(|| {
        std::env::var("FLATSURF_EPS")
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|e| e.is_finite() && *e > 0.0)
            .unwrap_or(DEFAULT_EPS_GEOM)
    })
}

/// Symbolic name of a pair of glued polygon edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(pub u32);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("a single regular {0}-gon has no translation gluing; n must be even")]
    OddSingle(usize),
    #[error("invalid gluing: {0}")]
    InvalidGluing(String),
    #[error("polygon {0} is not level")]
    NotLevel(usize),
    #[error("cylinder decomposition failed: {0}")]
    Decomposition(String),
    #[error("surface has no common modulus")]
    NotPerfect,
    #[error("trajectory hit a vertex before crossing {index}")]
    VertexHit {
        index: usize,
        partial: Box<flow::CuttingSequence>,
    },
    #[error("point {0} is not on the surface")]
    OffSurface(SurfacePoint),
    #[error("no admissible transition {0} -> {1}")]
    InadmissiblePair(Label, Label),
    #[error("sequence is inadmissible at position {0}")]
    Inadmissible(usize),
    #[error("cutting sequence window must have at least {0} letters")]
    WindowTooShort(usize),
    #[error("sandwich rule only applies to regular polygon surfaces")]
    WrongFamily,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
