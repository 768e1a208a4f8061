use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use flatsurf::automorphisms::{flip_shear_point, flip_shear_vector, Charts};
use flatsurf::cylinders::{decompose, perfectness, theta_s};
use flatsurf::derivation::{sandwich_derive, Deriver};
use flatsurf::export::{to_json, word_table, word_table_text, CylinderDoc, SurfaceDoc};
use flatsurf::flow::{flow, flow_vector, segments, Trajectory};
use flatsurf::sampling::Sampler;
use flatsurf::svg::{render, SvgOptions};
use flatsurf::verify::{run_suite, SuiteOptions};
use flatsurf::{
    build_bouw_moller, build_regular_surface, check_grid_shape, transition_diagram, validate_special, Family,
    Label, Surface, SurfacePoint,
};

#[derive(Parser)]
#[command(name = "flatsurf", version, about = "Translation surfaces, cutting sequences and the flip-shear")]
struct Cli {
    #[command(flatten)]
    surface: SurfaceArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Regular,
    Bm,
}

#[derive(Args)]
struct SurfaceArgs {
    #[arg(long, value_enum, default_value = "regular", global = true)]
    family: FamilyArg,
    /// Number of sides (regular) or the n parameter (Bouw-Möller).
    #[arg(long, default_value_t = 8, global = true)]
    n: usize,
    /// Number of polygons of a Bouw-Möller surface.
    #[arg(long, default_value_t = 3, global = true)]
    m: usize,
    /// Two copies of the regular polygon instead of one.
    #[arg(long, global = true)]
    double: bool,
}

#[derive(Args, Clone)]
struct TrajectoryArgs {
    /// Direction angle in radians; sampled from the admissible sector if absent.
    #[arg(long)]
    theta: Option<f64>,
    /// Start point as x,y@poly; sampled if absent.
    #[arg(long)]
    start: Option<SurfacePoint>,
    /// Number of crossings.
    #[arg(long, default_value_t = 20)]
    window: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Combinatorial,
    Sandwich,
    Geometric,
}

#[derive(Subcommand)]
enum Command {
    /// Build a surface and write or describe it.
    Surface {
        #[command(subcommand)]
        action: SurfaceAction,
    },
    /// Draw the surface as SVG.
    Render {
        #[arg(long)]
        cylinders: bool,
        #[arg(long)]
        sheared: bool,
        /// Overlay a trajectory.
        #[arg(long)]
        trajectory: bool,
        #[command(flatten)]
        traj: TrajectoryArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Horizontal cylinder decomposition and moduli.
    Cylinders {
        #[arg(long)]
        json: bool,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cutting sequence of a trajectory.
    Flow {
        #[command(flatten)]
        traj: TrajectoryArgs,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Derived sequence of a trajectory.
    Derive {
        #[arg(long, value_enum, default_value = "combinatorial")]
        mode: Mode,
        #[command(flatten)]
        traj: TrajectoryArgs,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Three-letter words of the transition diagram with their verdicts.
    Words {
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transition diagram for the admissible sector.
    Diagram {
        #[arg(long)]
        dot: bool,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification checks on the surface.
    Verify {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 100)]
        window: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SurfaceAction {
    /// Write the surface as JSON.
    Build {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print polygons, edges and labels.
    Dump,
}

fn build_surface(a: &SurfaceArgs) -> Result<Surface> {
    let s = match a.family {
        FamilyArg::Regular => build_regular_surface(a.n, a.double)?,
        FamilyArg::Bm => build_bouw_moller(a.m, a.n)?,
    };
    let report = validate_special(&s);
    if !report.passed() {
        bail!("surface failed validation: {}", report.failures.join("; "));
    }
    Ok(s)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(p: &PathBuf, text: &str) -> Result<()> {
    fs::write(p, text).with_context(|| format!("writing {}", p.display()))
}

fn trajectory(s: &Surface, t: &TrajectoryArgs) -> Result<Trajectory> {
    let mut sampler = Sampler::new(s, t.seed);
    let sampled = sampler.trajectory(theta_s(s)?);
    let start = t.start.unwrap_or(sampled.start);
    if start.poly >= s.polygons().len() || !s.polygon(start.poly).contains(start.pos, 1e-9) {
        bail!("start point {start} is not on the surface");
    }
    Ok(Trajectory::new(start, t.theta.unwrap_or(sampled.theta)))
}

fn labels_text(labels: &[Label]) -> String {
    labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
}

fn run(cli: Cli) -> Result<ExitCode> {
    let s = build_surface(&cli.surface)?;
    match cli.command {
        Command::Surface { action } => match action {
            SurfaceAction::Build { out } => emit(&out, &to_json(&SurfaceDoc::new(&s)))?,
            SurfaceAction::Dump => {
                let mut text = format!("{}\n", s.family().name());
                for (i, p) in s.polygons().iter().enumerate() {
                    text.push_str(&format!("polygon {i}: {} edges\n", p.edge_count()));
                    for j in 0..p.edge_count() {
                        let e = flatsurf::EdgeRef::new(i, j);
                        let (a, b) = s.segment(e);
                        text.push_str(&format!(
                            "  edge {j}: label {:>3}  {:?}  ({:.6}, {:.6}) -> ({:.6}, {:.6})  glued to {}\n",
                            s.label(e),
                            s.side(e),
                            a.x,
                            a.y,
                            b.x,
                            b.y,
                            s.partner(e)
                        ));
                    }
                }
                print!("{text}");
            }
        },
        Command::Render {
            cylinders,
            sheared,
            trajectory: with_traj,
            traj,
            out,
        } => {
            let mut opts = SvgOptions {
                cylinders,
                sheared,
                trajectory: Vec::new(),
            };
            if with_traj {
                let t = trajectory(&s, &traj)?;
                let c = flow(&s, &t, traj.window)?;
                opts.trajectory = segments(&s, t.start, &c);
            }
            emit(&out, &render(&s, &opts)?)?;
        }
        Command::Cylinders { json, svg, out } => {
            let cyls = decompose(&s)?;
            let report = perfectness(&s)?;
            let doc = CylinderDoc::new(&s, &cyls, &report, theta_s(&s)?);
            if json {
                emit(&out, &to_json(&doc))?;
            } else {
                let mut text = format!(
                    "{}: {} cylinders, perfect = {}, M = {:.12}, theta_s = {:.12}\n",
                    s.family().name(),
                    cyls.len(),
                    doc.perfect,
                    doc.common_modulus,
                    doc.theta_s
                );
                for (i, c) in doc.cylinders.iter().enumerate() {
                    text.push_str(&format!(
                        "  {i}: {:<11} W = {:.9}  H = {:.9}  modulus = {:.9}  labels {}\n",
                        format!("{:?}", c.kind).to_lowercase(),
                        c.width,
                        c.height,
                        c.modulus,
                        labels_text(&c.labels)
                    ));
                }
                emit(&out, &text)?;
            }
            if let Some(p) = svg {
                let opts = SvgOptions {
                    cylinders: true,
                    ..Default::default()
                };
                write_file(&p, &render(&s, &opts)?)?;
            }
        }
        Command::Flow { traj, json, svg, out } => {
            let t = trajectory(&s, &traj)?;
            let c = flow(&s, &t, traj.window)?;
            if json {
                let v = json!({
                    "start": t.start,
                    "theta": t.theta,
                    "labels": c.labels,
                    "crossings": c.crossings,
                });
                emit(&out, &to_json(&v))?;
            } else {
                emit(&out, &format!("{}\n", labels_text(&c.labels)))?;
            }
            if let Some(p) = svg {
                let opts = SvgOptions {
                    trajectory: segments(&s, t.start, &c),
                    ..Default::default()
                };
                write_file(&p, &render(&s, &opts)?)?;
            }
        }
        Command::Derive { mode, traj, json, out } => {
            if traj.window < 3 {
                return Err(flatsurf::Error::WindowTooShort(3).into());
            }
            let t = trajectory(&s, &traj)?;
            let c = flow(&s, &t, traj.window)?;
            let derived: Vec<Label> = match mode {
                Mode::Combinatorial => Deriver::new(&s)?.derive(&c.labels)?.labels,
                Mode::Sandwich => sandwich_derive(s.family(), &c.labels)?.labels,
                Mode::Geometric => {
                    let charts = Charts::new(&s)?;
                    let m = charts.modulus()?;
                    let start = flip_shear_point(&charts, t.start)?;
                    let dir = flip_shear_vector(t.direction(), m);
                    let (lo, hi) = (c.crossings[0].t, c.crossings[c.len() - 1].t);
                    let image = flow_vector(&s, start, dir, 4 * traj.window + 8)?;
                    image
                        .crossings
                        .iter()
                        .filter(|x| x.t > lo && x.t < hi)
                        .map(|x| x.label)
                        .collect()
                }
            };
            if json {
                let v = json!({
                    "start": t.start,
                    "theta": t.theta,
                    "mode": format!("{mode:?}").to_lowercase(),
                    "sequence": c.labels,
                    "derived": derived,
                });
                emit(&out, &to_json(&v))?;
            } else {
                emit(&out, &format!("{}\n{}\n", labels_text(&c.labels), labels_text(&derived)))?;
            }
        }
        Command::Words { json, out } => {
            let words = Deriver::new(&s)?.words()?;
            if json {
                emit(&out, &to_json(&word_table(&words)))?;
            } else {
                emit(&out, &word_table_text(&words))?;
            }
        }
        Command::Diagram { dot, json, out } => {
            let d = transition_diagram(&s)?;
            let grid = match s.family() {
                Family::BouwMoller { m, n } => check_grid_shape(&d, m, n).grid,
                _ => None,
            };
            if dot {
                emit(&out, &d.to_dot(grid.as_deref()))?;
            } else if json {
                let arrows: Vec<_> = d
                    .arrows
                    .iter()
                    .map(|a| json!({"from": a.from, "to": a.to, "polygon": a.poly}))
                    .collect();
                emit(&out, &to_json(&json!({"nodes": d.nodes, "arrows": arrows, "grid": grid})))?;
            } else {
                let mut text = String::new();
                for l in &d.nodes {
                    let succ: Vec<Label> = d.successors(*l).collect();
                    text.push_str(&format!("{l} -> {}\n", labels_text(&succ)));
                }
                emit(&out, &text)?;
            }
        }
        Command::Verify {
            trials,
            window,
            seed,
            json,
            out,
        } => {
            if window < 3 {
                return Err(flatsurf::Error::WindowTooShort(3).into());
            }
            let opts = SuiteOptions { trials, window, seed };
            let results = run_suite(std::slice::from_ref(&s), &opts);
            let ok = results.iter().all(|r| r.passed);
            if json {
                emit(&out, &to_json(&results))?;
            } else {
                let mut text = String::new();
                for r in &results {
                    text.push_str(&format!(
                        "{} {:<45} {:>10.1} ms  {}\n",
                        if r.passed { "PASS" } else { "FAIL" },
                        r.name,
                        r.millis,
                        r.detail
                    ));
                }
                text.push_str(if ok { "all checks passed\n" } else { "some checks FAILED\n" });
                emit(&out, &text)?;
            }
            if !ok {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
