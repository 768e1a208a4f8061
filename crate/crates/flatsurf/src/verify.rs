//! Cross-checks between the geometric and combinatorial pictures.
//!
//! Each check returns a [`CheckResult`]; [`run_suite`] runs the default set
//! used by the command line tool.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automorphisms::{flip_shear_point, flip_shear_vector, Charts};
use crate::cylinders::{decompose, perfectness_of, theta_s_of};
use crate::derivation::{sandwiched_positions, Deriver};
use crate::diagrams::check_grid_shape;
use crate::flow::{flow_vector, Trajectory};
use crate::geometry::{build_bouw_moller, build_regular_surface, validate_special, Family, Surface};
use crate::oracle::unfold_labels;
use crate::sampling::Sampler;
use crate::{Error, Label, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub millis: f64,
}

impl CheckResult {
    fn timed(name: impl Into<String>, f: impl FnOnce() -> (bool, String)) -> Self {
        let t = Instant::now();
        let (passed, detail) = f();
        CheckResult {
            name: name.into(),
            passed,
            detail,
            millis: t.elapsed().as_secs_f64() * 1e3,
        }
    }
}

/// How one sampled trajectory compared with the derivation rule.
#[derive(Clone, Debug, PartialEq)]
pub enum Trial {
    Agree,
    Disagree {
        trajectory: Trajectory,
        derived: Vec<Label>,
        marked: Vec<Label>,
    },
    /// The trajectory or its image ran into a vertex.
    Skipped,
}

/// Everything needed to run trials on one surface.
pub struct Bench<'a> {
    pub surface: &'a Surface,
    pub charts: Charts<'a>,
    pub deriver: Deriver<'a>,
    pub theta_s: f64,
    pub modulus: f64,
}

impl<'a> Bench<'a> {
    pub fn new(surface: &'a Surface) -> Result<Self> {
        let charts = Charts::new(surface)?;
        let modulus = charts.modulus()?;
        let theta_s = theta_s_of(charts.cylinders());
        Ok(Bench {
            surface,
            deriver: Deriver::new(surface)?,
            charts,
            theta_s,
            modulus,
        })
    }

    /// Compares the cutting sequence of `V_M` applied to the trajectory with
    /// the letters the rule keeps, over a window of `n` crossings.
    ///
    /// Only image crossings strictly between the first and last original
    /// crossings are compared. The first and last original letters may or may
    /// not have image crossings inside that range, so they are allowed at the
    /// ends when they are kept by the rule with one more letter of context.
    pub fn main_theorem_trial(&self, traj: &Trajectory, n: usize) -> Result<Trial> {
        let s = self.surface;
        let d = traj.direction();
        let fwd = match flow_vector(s, traj.start, d, n + 1) {
            Ok(c) => c,
            Err(Error::VertexHit { .. }) => return Ok(Trial::Skipped),
            Err(e) => return Err(e),
        };
        let back = match flow_vector(s, traj.start, -d, 1) {
            Ok(c) => c,
            Err(Error::VertexHit { .. }) => return Ok(Trial::Skipped),
            Err(e) => return Err(e),
        };
        // letters -1, 0, ..., n
        let mut ext = vec![back.labels[0]];
        ext.extend_from_slice(&fwd.labels);
        let kept = |i: usize| -> Result<bool> { self.deriver.keeps(ext[i], ext[i + 1], ext[i + 2]) };
        let t: Vec<f64> = fwd.crossings.iter().map(|c| c.t).collect();
        let (t_first, t_last) = (t[0], t[n - 1]);

        let image_start = flip_shear_point(&self.charts, traj.start)?;
        let image_dir = flip_shear_vector(d, self.modulus);
        // the image moves at the same parameter speed; a little over the
        // window is enough
        let mut image = Vec::new();
        let mut budget = 2 * n + 8;
        loop {
            let c = match flow_vector(s, image_start, image_dir, budget) {
                Ok(c) => c,
                Err(Error::VertexHit { .. }) => return Ok(Trial::Skipped),
                Err(e) => return Err(e),
            };
            if c.crossings.last().is_some_and(|x| x.t >= t_last) {
                image = c.crossings;
                break;
            }
            budget *= 2;
            if budget > 64 * n + 64 {
                break;
            }
        }
        let derived: Vec<(Label, f64)> = image
            .iter()
            .filter(|c| c.t > t_first && c.t < t_last)
            .map(|c| (c.label, c.t))
            .collect();
        let mut marked = Vec::new();
        for i in 1..n - 1 {
            if kept(i)? {
                marked.push(fwd.labels[i]);
            }
        }
        let labels: Vec<Label> = derived.iter().map(|x| x.0).collect();
        let front_ok = kept(0)? && derived.first().is_some_and(|x| x.0 == fwd.labels[0] && x.1 < t[1]);
        let back_ok = kept(n - 1)? && derived.last().is_some_and(|x| x.0 == fwd.labels[n - 1] && x.1 > t[n - 2]);
        let mut accept = labels == marked;
        for (f, b) in [(true, false), (false, true), (true, true)] {
            if accept || (f && !front_ok) || (b && !back_ok) {
                continue;
            }
            let lo = usize::from(f);
            let hi = labels.len().saturating_sub(usize::from(b));
            accept = lo <= hi && labels[lo..hi] == marked[..];
        }
        Ok(if accept {
            Trial::Agree
        } else {
            Trial::Disagree {
                trajectory: *traj,
                derived: labels,
                marked,
            }
        })
    }
}

/// Runs `trials` sampled trajectories of `window` crossings; returns the
/// number that agreed, the number skipped, and the first disagreement.
pub fn main_theorem(s: &Surface, trials: usize, window: usize, seed: u64) -> Result<(usize, usize, Option<Trial>)> {
    if window < 3 {
        return Err(Error::WindowTooShort(3));
    }
    let bench = Bench::new(s)?;
    let mut sampler = Sampler::new(s, seed);
    let samples: Vec<Trajectory> = (0..trials).map(|_| sampler.trajectory(bench.theta_s)).collect();
    let outcomes: Vec<Result<Trial>> = samples
        .par_iter()
        .map(|t| bench.main_theorem_trial(t, window))
        .collect();
    let (mut agree, mut skipped, mut first_bad) = (0, 0, None);
    for o in outcomes {
        match o? {
            Trial::Agree => agree += 1,
            Trial::Skipped => skipped += 1,
            bad => {
                first_bad.get_or_insert(bad);
            }
        }
    }
    Ok((agree, skipped, first_bad))
}

/// Compares the combinatorial rule with the sandwich rule on sampled windows
/// of a regular polygon surface.
pub fn sandwich_equivalence(s: &Surface, trials: usize, window: usize, seed: u64) -> Result<(usize, usize)> {
    let bench = Bench::new(s)?;
    let mut sampler = Sampler::new(s, seed);
    let (mut same, mut total) = (0, 0);
    for _ in 0..trials {
        let t = sampler.trajectory(bench.theta_s);
        let c = match crate::flow::flow(s, &t, window) {
            Ok(c) => c,
            Err(Error::VertexHit { .. }) => continue,
            Err(e) => return Err(e),
        };
        total += 1;
        if bench.deriver.derive(&c.labels)?.positions == sandwiched_positions(&c.labels) {
            same += 1;
        }
    }
    Ok((same, total))
}

/// Compares the flow with the unfolding tracer on sampled trajectories in
/// arbitrary directions.
pub fn oracle_agreement(s: &Surface, trials: usize, window: usize, seed: u64) -> Result<(usize, usize)> {
    let mut sampler = Sampler::new(s, seed);
    let (mut same, mut total) = (0, 0);
    for _ in 0..trials {
        let start = sampler.point();
        let theta = sampler.unit() * std::f64::consts::TAU;
        let t = Trajectory::new(start, theta);
        let a = crate::flow::flow(s, &t, window);
        let b = unfold_labels(s, start, t.direction(), window);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                total += 1;
                if a.labels == b {
                    same += 1;
                }
            }
            (Err(Error::VertexHit { .. }), _) | (_, Err(Error::VertexHit { .. })) => {}
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    Ok((same, total))
}

/// Largest distance between `p` and `V_M(V_M(p))` over sampled points.
pub fn involution_error(s: &Surface, points: usize, seed: u64) -> Result<f64> {
    let charts = Charts::new(s)?;
    let mut sampler = Sampler::new(s, seed);
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let p = sampler.point();
        let q = flip_shear_point(&charts, flip_shear_point(&charts, p)?)?;
        let err = if s.same_point(p, q, 1e-9) {
            0.0
        } else if p.poly == q.poly {
            p.pos.dist(q.pos)
        } else {
            f64::INFINITY
        };
        worst = worst.max(err);
    }
    Ok(worst)
}

/// Options for [`run_suite`].
#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub trials: usize,
    pub window: usize,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            trials: 200,
            window: 100,
            seed: 1,
        }
    }
}

fn surface_checks(s: &Surface, opts: &SuiteOptions) -> Vec<CheckResult> {
    let name = s.family().name();
    let mut out = vec![CheckResult::timed(format!("{name}: special"), || {
        let r = validate_special(s);
        (r.passed(), r.failures.join("; "))
    })];
    out.push(CheckResult::timed(format!("{name}: perfect"), || {
        match decompose(s) {
            Ok(c) => {
                let r = perfectness_of(s, &c);
                (r.is_perfect, format!("M = {:.12}", r.common_modulus))
            }
            Err(e) => (false, e.to_string()),
        }
    }));
    out.push(CheckResult::timed(format!("{name}: involution"), || {
        match involution_error(s, 1000, opts.seed) {
            Ok(e) => (e <= 1e-9, format!("max error {e:.3e}")),
            Err(e) => (false, e.to_string()),
        }
    }));
    out.push(CheckResult::timed(format!("{name}: derivation rule"), || {
        match main_theorem(s, opts.trials, opts.window, opts.seed) {
            Ok((agree, skipped, bad)) => (
                bad.is_none(),
                match bad {
                    None => format!("{agree} agreed, {skipped} skipped"),
                    Some(b) => format!("{agree} agreed; first mismatch {b:?}"),
                },
            ),
            Err(e) => (false, e.to_string()),
        }
    }));
    if s.family().is_regular() {
        out.push(CheckResult::timed(format!("{name}: sandwich rule"), || {
            match sandwich_equivalence(s, opts.trials, opts.window, opts.seed) {
                Ok((same, total)) => (same == total && total > 0, format!("{same}/{total}")),
                Err(e) => (false, e.to_string()),
            }
        }));
    }
    if let Family::BouwMoller { m, n } = s.family() {
        out.push(CheckResult::timed(format!("{name}: diagram grid"), || {
            match crate::diagrams::transition_diagram(s) {
                Ok(d) => {
                    let r = check_grid_shape(&d, m, n);
                    (r.passed, r.failure.unwrap_or_default())
                }
                Err(e) => (false, e.to_string()),
            }
        }));
    }
    out.push(CheckResult::timed(format!("{name}: unfolding tracer"), || {
        match oracle_agreement(s, 50, opts.window, opts.seed) {
            Ok((same, total)) => (same == total && total > 0, format!("{same}/{total}")),
            Err(e) => (false, e.to_string()),
        }
    }));
    out
}

/// The default surfaces checked by [`run_suite`].
pub fn default_surfaces() -> Vec<Surface> {
    let mut v = Vec::new();
    for n in [5, 7] {
        v.extend(build_regular_surface(n, true));
    }
    v.extend(build_regular_surface(8, false));
    for (m, n) in [(3, 4), (4, 3), (5, 4), (6, 5)] {
        v.extend(build_bouw_moller(m, n));
    }
    v
}

/// Runs every check on the given surfaces.
pub fn run_suite(surfaces: &[Surface], opts: &SuiteOptions) -> Vec<CheckResult> {
    surfaces.iter().flat_map(|s| surface_checks(s, opts)).collect()
}
