//! One test per acceptance criterion. Each prints a single `PASS`/`FAIL`
//! line with its measurements; run with `--nocapture` to see them.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use flatsurf::automorphisms::flip_shear_vector;
use flatsurf::derivation::sandwich_derive;
use flatsurf::diagrams::check_grid_shape;
use flatsurf::oracle::unfold_labels;
use flatsurf::sampling::Sampler;
use flatsurf::vec2::Vec2;
use flatsurf::verify::{default_surfaces, involution_error, main_theorem};
use flatsurf::{
    build_bouw_moller, build_regular_surface, decompose, derive_combinatorial, enumerate_words, flow, theta_s,
    transition_diagram, CylinderKind, Error, Surface,
};
use petgraph::algo::is_isomorphic_matching;

const TOL: f64 = 1e-9;

fn cot(x: f64) -> f64 {
    x.cos() / x.sin()
}

/// Runs a criterion, prints its verdict line and fails the test on error.
fn criterion(id: u32, name: &str, limit: Option<Duration>, body: impl FnOnce() -> Result<String, String>) {
    let t0 = Instant::now();
    let outcome = body();
    let elapsed = t0.elapsed();
    let outcome = match (outcome, limit) {
        (Ok(_), Some(l)) if elapsed > l => Err(format!("took {elapsed:?}, limit {l:?}")),
        (o, _) => o,
    };
    match &outcome {
        Ok(detail) => println!("PASS criterion {id:>2} {name}: {detail} ({} ms)", elapsed.as_millis()),
        Err(detail) => println!("FAIL criterion {id:>2} {name}: {detail} ({} ms)", elapsed.as_millis()),
    }
    if let Err(detail) = outcome {
        panic!("criterion {id} failed: {detail}");
    }
}

fn regular_surfaces() -> Vec<(String, usize, Surface)> {
    let mut v = Vec::new();
    for n in 3..=12 {
        v.push((format!("double {n}-gon"), n, build_regular_surface(n, true).unwrap()));
    }
    for n in [4, 6, 8, 10, 12] {
        v.push((format!("single {n}-gon"), n, build_regular_surface(n, false).unwrap()));
    }
    v
}

#[test]
fn criterion_01_regular_moduli() {
    criterion(1, "regular polygon moduli", Some(Duration::from_secs(1)), || {
        let mut count = 0;
        for (name, n, s) in regular_surfaces() {
            let typical = 2.0 * cot(PI / n as f64);
            for c in decompose(&s).map_err(|e| format!("{name}: {e}"))? {
                let want = match c.kind {
                    CylinderKind::Typical => typical,
                    CylinderKind::Exceptional => typical / 2.0,
                    CylinderKind::Irregular => return Err(format!("{name}: irregular cylinder")),
                };
                if (c.modulus - want).abs() > TOL {
                    return Err(format!("{name}: modulus {} != {want}", c.modulus));
                }
                count += 1;
            }
        }
        Ok(format!("{count} cylinders on 15 surfaces"))
    });
}

#[test]
fn criterion_02_bouw_moller_moduli() {
    criterion(2, "Bouw-Moller moduli", Some(Duration::from_secs(5)), || {
        let mut count = 0;
        for m in 2..=8 {
            for n in 3..=8 {
                let (mf, nf) = (m as f64, n as f64);
                let want = 2.0 * cot(PI / nf) + 2.0 * (PI / mf).cos() / (PI / nf).sin();
                let s = build_bouw_moller(m, n).map_err(|e| e.to_string())?;
                for c in decompose(&s).map_err(|e| format!("({m},{n}): {e}"))? {
                    if (c.modulus - want).abs() > TOL {
                        return Err(format!("({m},{n}): {:?} cylinder modulus {} != {want}", c.kind, c.modulus));
                    }
                    count += 1;
                }
            }
        }
        Ok(format!("{count} cylinders on 42 surfaces"))
    });
}

#[test]
fn criterion_03_theta_s() {
    criterion(3, "smallest slant angle", None, || {
        for (name, n, s) in regular_surfaces() {
            let got = theta_s(&s).map_err(|e| e.to_string())?;
            if (got - PI / n as f64).abs() > TOL {
                return Err(format!("{name}: {got} != π/{n}"));
            }
        }
        Ok("θ_s = π/n on 15 surfaces".into())
    });
}

#[test]
fn criterion_04_derivation_rule() {
    criterion(4, "derived sequence matches the image trajectory", Some(Duration::from_secs(60)), || {
        let mut lines = Vec::new();
        for s in default_surfaces() {
            let name = s.family().name();
            let (agree, skipped, bad) = main_theorem(&s, 200, 100, 1).map_err(|e| format!("{name}: {e}"))?;
            if let Some(bad) = bad {
                return Err(format!("{name}: {bad:?}"));
            }
            if agree + skipped != 200 || agree < 190 {
                return Err(format!("{name}: only {agree} of 200 compared ({skipped} skipped)"));
            }
            lines.push(format!("{name} {agree}/200"));
        }
        Ok(lines.join(", "))
    });
}

#[test]
fn criterion_05_sandwich_rule() {
    criterion(5, "sandwich rule on regular surfaces", None, || {
        let mut total = 0;
        for s in default_surfaces().into_iter().filter(|s| s.family().is_regular()) {
            let theta = theta_s(&s).map_err(|e| e.to_string())?;
            let mut sampler = Sampler::new(&s, 1);
            for _ in 0..200 {
                let t = sampler.trajectory(theta);
                let c = match flow(&s, &t, 100) {
                    Ok(c) => c,
                    Err(Error::VertexHit { .. }) => continue,
                    Err(e) => return Err(e.to_string()),
                };
                let a = derive_combinatorial(&s, &c.labels).map_err(|e| e.to_string())?;
                let b = sandwich_derive(s.family(), &c.labels).map_err(|e| e.to_string())?;
                if a != b {
                    return Err(format!("{}: {:?} vs {:?}", s.family().name(), a.labels, b.labels));
                }
                total += 1;
            }
        }
        if total < 570 {
            return Err(format!("only {total} windows compared"));
        }
        Ok(format!("{total} windows identical"))
    });
}

#[test]
fn criterion_06_word_table() {
    criterion(6, "(3,4) word table", None, || {
        // word, type, kept
        const EXPECTED: [(&str, &str, bool); 22] = [
            ("121", "(00)", true),
            ("212", "(00)", true),
            ("343", "(00)", true),
            ("434", "(00)", true),
            ("676", "(00)", true),
            ("767", "(00)", true),
            ("123", "(01)", false),
            ("218", "(01)", false),
            ("436", "(01)", false),
            ("672", "(01)", false),
            ("765", "(01)", false),
            ("234", "(10)", false),
            ("367", "(10)", false),
            ("543", "(10)", false),
            ("721", "(10)", false),
            ("876", "(10)", false),
            ("187", "(11)", true),
            ("236", "(11)", true),
            ("365", "(11)", true),
            ("654", "(11)", true),
            ("723", "(11)", true),
            ("872", "(11)", true),
        ];
        let s = build_bouw_moller(3, 4).map_err(|e| e.to_string())?;
        let mut got: Vec<(String, String, bool)> = enumerate_words(&s)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|w| (w.text(), w.type_name(), w.kept))
            .collect();
        got.sort();
        let mut want: Vec<(String, String, bool)> =
            EXPECTED.iter().map(|&(w, t, k)| (w.into(), t.into(), k)).collect();
        want.sort();
        if got != want {
            return Err(format!("table differs: {got:?}"));
        }
        let sandwiched = |w: &str| w.as_bytes()[0] == w.as_bytes()[2];
        let s00 = EXPECTED.iter().filter(|e| e.1 == "(00)" && sandwiched(e.0)).count();
        let s11 = EXPECTED.iter().filter(|e| e.1 == "(11)" && !sandwiched(e.0)).count();
        if (s00, s11) != (6, 6) {
            return Err(format!("sandwich split {s00}/{s11}"));
        }
        Ok("22 words, 12 kept, six (00) sandwiched, six (11) not".into())
    });
}

#[test]
fn criterion_07_involution() {
    criterion(7, "flip-shear is an involution", None, || {
        let mut worst: f64 = 0.0;
        for s in default_surfaces() {
            worst = worst.max(involution_error(&s, 1000, 1).map_err(|e| e.to_string())?);
        }
        if worst > TOL {
            return Err(format!("point error {worst:e}"));
        }
        for s in default_surfaces() {
            let m = flatsurf::perfectness(&s).map_err(|e| e.to_string())?.common_modulus;
            for e in [Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)] {
                if flip_shear_vector(flip_shear_vector(e, m), m) != e {
                    return Err(format!("derivative squared is not the identity for M = {m}"));
                }
            }
        }
        Ok(format!("max point error {worst:e}, derivative exact"))
    });
}

#[test]
fn criterion_08_transition_diagrams() {
    criterion(8, "transition diagrams", None, || {
        let oct = transition_diagram(&build_regular_surface(8, false).unwrap()).map_err(|e| e.to_string())?;
        for (a, b) in [(1, 2), (2, 1), (2, 3)] {
            if !oct.has_arrow(flatsurf::Label(a), flatsurf::Label(b)) {
                return Err(format!("octagon lacks {a} -> {b}"));
            }
        }
        for m in 2..=8 {
            for n in 3..=8 {
                let d = transition_diagram(&build_bouw_moller(m, n).unwrap()).map_err(|e| e.to_string())?;
                let r = check_grid_shape(&d, m, n);
                if !r.passed {
                    return Err(format!("({m},{n}): {:?}", r.failure));
                }
            }
        }
        for n in 3..=8 {
            let a = transition_diagram(&build_bouw_moller(2, n).unwrap()).map_err(|e| e.to_string())?;
            let b = transition_diagram(&build_regular_surface(n, true).unwrap()).map_err(|e| e.to_string())?;
            if !is_isomorphic_matching(&a.graph(), &b.graph(), |_, _| true, |_, _| true) {
                return Err(format!("(2,{n}) differs from the double {n}-gon"));
            }
        }
        Ok("octagon arrows, 42 grids, 6 (2,n) isomorphisms".into())
    });
}

#[test]
fn criterion_09_trig_identities() {
    criterion(9, "trigonometric identities", None, || {
        let mut worst: f64 = 0.0;
        for n in 3..=12 {
            let th = 2.0 * PI / n as f64;
            for k in 0..=10 {
                let dirichlet: f64 = 1.0 + (1..=k).map(|j| 2.0 * (j as f64 * th).cos()).sum::<f64>();
                let kf = k as f64;
                worst = worst.max((dirichlet - ((kf + 0.5) * th).sin() / (th / 2.0).sin()).abs());
                // The cylinder width is 2(1 + 2cos θ + ... + 2cos kθ + cos(k+1)θ).
                // That whole expression equals 2cot(θ/2)sin((k+1)θ); without the
                // outer factor 2 on the left the identity is off by a factor of 2.
                let width = 2.0 * (dirichlet + ((kf + 1.0) * th).cos());
                let closed = 2.0 * cot(th / 2.0) * ((kf + 1.0) * th).sin();
                worst = worst.max((width - closed).abs());
                let halved = width / 2.0;
                if closed.abs() > 1e-6 && (halved - closed).abs() < 1e-6 {
                    return Err(format!("unnormalized form unexpectedly holds at n={n}, k={k}"));
                }
            }
        }
        if worst > TOL {
            return Err(format!("error {worst:e}"));
        }
        Ok(format!("max error {worst:e}"))
    });
}

#[test]
fn criterion_10_unfolding_tracer() {
    criterion(10, "flow agrees with the unfolding tracer", None, || {
        let s = build_regular_surface(5, true).unwrap();
        let mut sampler = Sampler::new(&s, 10);
        let mut done = 0;
        while done < 50 {
            let start = sampler.point();
            let t = flatsurf::Trajectory::new(start, sampler.unit() * 2.0 * PI);
            let a = match flow(&s, &t, 50) {
                Ok(a) => a.labels,
                Err(Error::VertexHit { .. }) => continue,
                Err(e) => return Err(e.to_string()),
            };
            let b = unfold_labels(&s, start, t.direction(), 50).map_err(|e| e.to_string())?;
            if a != b {
                return Err(format!("{t:?}: {a:?} vs {b:?}"));
            }
            done += 1;
        }
        Ok("50 trajectories x 50 crossings".into())
    });
}
