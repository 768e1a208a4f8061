//! Seeded random start points and directions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::flow::Trajectory;
use crate::geometry::{Surface, SurfacePoint};
use crate::vec2::Vec2;

/// Minimum distance of a sampled point from the polygon boundary.
pub const BOUNDARY_MARGIN: f64 = 1e-6;

/// Margin kept from the ends of the direction sector.
pub const ANGLE_MARGIN: f64 = 1e-4;

/// Deterministic sampler over one surface.
pub struct Sampler<'a> {
    surface: &'a Surface,
    rng: ChaCha8Rng,
    cumulative: Vec<f64>,
}

impl<'a> Sampler<'a> {
    pub fn new(surface: &'a Surface, seed: u64) -> Self {
        let mut acc = 0.0;
        let cumulative = surface
            .polygons()
            .iter()
            .map(|p| {
                acc += p.area();
                acc
            })
            .collect();
        Sampler {
            surface,
            rng: ChaCha8Rng::seed_from_u64(seed),
            cumulative,
        }
    }

    /// Uniform point in the interior of the surface.
    pub fn point(&mut self) -> SurfacePoint {
        let total = *self.cumulative.last().expect("surface has polygons");
        let pick = self.rng.gen::<f64>() * total;
        let poly = self.cumulative.partition_point(|&c| c <= pick).min(self.cumulative.len() - 1);
        let polygon = self.surface.polygon(poly);
        let (lo, hi) = polygon.bbox();
        loop {
            let p = Vec2::new(self.rng.gen_range(lo.x..hi.x), self.rng.gen_range(lo.y..hi.y));
            if polygon.inner_distance(p) > BOUNDARY_MARGIN {
                return SurfacePoint::new(poly, p);
            }
        }
    }

    /// Uniform angle strictly inside `(0, theta_max)`.
    pub fn angle(&mut self, theta_max: f64) -> f64 {
        self.rng.gen_range(ANGLE_MARGIN..theta_max - ANGLE_MARGIN)
    }

    pub fn trajectory(&mut self, theta_max: f64) -> Trajectory {
        let start = self.point();
        Trajectory::new(start, self.angle(theta_max))
    }

    pub fn unit(&mut self) -> f64 {
        self.rng.gen()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_bouw_moller;

    #[test]
    fn same_seed_same_samples() {
        let s = build_bouw_moller(3, 4).unwrap();
        let mut a = Sampler::new(&s, 7);
        let mut b = Sampler::new(&s, 7);
        for _ in 0..20 {
            assert_eq!(a.trajectory(0.3), b.trajectory(0.3));
        }
    }

    #[test]
    fn points_are_inside() {
        let s = build_bouw_moller(4, 3).unwrap();
        let mut a = Sampler::new(&s, 1);
        for _ in 0..200 {
            let p = a.point();
            assert!(s.polygon(p.poly).inner_distance(p.pos) > BOUNDARY_MARGIN);
        }
    }
}
