//! Command-line front end.
//!
//! Every subcommand builds a [`Scenario`] (shipped name, file, or defaults),
//! applies its flags as key overrides, validates, then runs. Output files go
//! to `--out-dir`, else `$SURGEKIT_OUT_DIR`, else `./out`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::averaging::{parameter_grid, stability_verdict};
use crate::compressor::{equilibrium_from_throttle, throttle_from_flow};
use crate::control::{extract_lt, simulate_closed_loop, zn_gains, ActuatorMode, ControllerKind};
use crate::error::{Error, Result};
use crate::ode::{integrate, steady_state_of, GreitzerSystem, Trajectory};
use crate::output::{read_trajectory_csv, render_svg, write_csv, PlotSpec, Series, Table};
use crate::scenario::{resolve_scenario, Scenario, ScenarioKind};
use crate::stability::{detect_limit_cycle, stability_scan, surge_boundary, FocusClass};

pub const OUT_DIR_ENV: &str = "SURGEKIT_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_MODEL: i32 = 4;
pub const EXIT_IO: i32 = 5;

/// Flow below which a closed-loop run is reported as an excursion.
pub const EXCURSION_LEVEL: f64 = 0.43;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::Config { .. } => EXIT_CONFIG,
        Error::Io(_) => EXIT_IO,
        Error::Domain { .. }
        | Error::ModelBreakdown { .. }
        | Error::NoEquilibrium { .. }
        | Error::Analysis(_)
        | Error::Diverged { .. }
        | Error::DegenerateResponse(_) => EXIT_MODEL,
    }
}

#[derive(Parser, Debug)]
#[command(name = "surgekit", version, about = "Compressor surge analysis and anti-surge control")]
struct Cli {
    /// Output directory (overrides $SURGEKIT_OUT_DIR).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Shipped scenario name (e.g. fig10) or path to a scenario file.
    #[arg(long)]
    scenario: Option<String>,
    /// Override any scenario key, e.g. `--set controller.gamma=2`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output file stem.
    #[arg(long)]
    name: Option<String>,
    /// Skip SVG output.
    #[arg(long)]
    no_svg: bool,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    lo: Option<f64>,
    #[arg(long)]
    hi: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Debug)]
struct PlantArgs {
    #[command(flatten)]
    common: Common,
    /// Equilibrium flow that sets the throttle.
    #[arg(long)]
    flow: Option<f64>,
    /// Throttle parameter (overrides --flow).
    #[arg(long)]
    g: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    psi0: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    settle_fraction: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug)]
struct TuneArgs {
    #[command(flatten)]
    common: Common,
    /// Dead time.
    #[arg(long = "L", allow_negative_numbers = true)]
    l: Option<f64>,
    /// Time constant.
    #[arg(long = "T", allow_negative_numbers = true)]
    t: Option<f64>,
    /// P, PI or PID.
    #[arg(long)]
    kind: Option<String>,
    /// CSV step response to measure L and T from.
    #[arg(long)]
    step_file: Option<PathBuf>,
    #[arg(long)]
    column: Option<String>,
}

#[derive(Args, Debug)]
struct LoopArgs {
    #[command(flatten)]
    common: Common,
    /// fixed-pd, fixed-pid or adaptive.
    #[arg(long)]
    controller: Option<String>,
    /// Disturbance target level.
    #[arg(long)]
    target: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Also integrate the compressor driven by the measured flow.
    #[arg(long)]
    observe: bool,
}

#[derive(Args, Debug)]
struct AvgArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    lo: Option<f64>,
    #[arg(long)]
    hi: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    k3: Option<f64>,
    /// linear or saturated.
    #[arg(long)]
    mode: Option<String>,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Shipped scenario name or path; the scenario's `kind` picks the command.
    scenario: String,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate the compressor map.
    Map(GridArgs),
    /// Stability indicators along the equilibrium line and the surge boundary.
    Stability(GridArgs),
    /// Open-loop surge-model run.
    Simulate(PlantArgs),
    /// Open-loop run with limit-cycle detection.
    LimitCycle(PlantArgs),
    /// Reaction-curve PID tuning.
    Tune(TuneArgs),
    /// Closed-loop anti-surge valve simulation.
    Closedloop(LoopArgs),
    /// Eigenvalues of the averaged adaptation dynamics on a gain grid.
    Averaging(AvgArgs),
    /// Run a scenario of any kind.
    Run(RunArgs),
}

type Overrides = Vec<(&'static str, Option<String>)>;

fn opt<T: ToString>(v: &Option<T>) -> Option<String> {
    v.as_ref().map(|v| v.to_string())
}

fn build(kind: ScenarioKind, common: &Common, flags: Overrides) -> Result<Scenario> {
    let mut sc = match &common.scenario {
        Some(s) => {
            let sc = resolve_scenario(s)?;
            if sc.kind != kind {
                return Err(Error::Config {
                    key: "kind".into(),
                    msg: format!(
                        "scenario `{}` is a {} scenario, not {}",
                        sc.name,
                        sc.kind.as_str(),
                        kind.as_str()
                    ),
                });
            }
            sc
        }
        None => Scenario {
            name: kind.as_str().into(),
            kind,
            ..Scenario::default()
        },
    };
    for (key, value) in flags {
        if let Some(v) = value {
            sc.set(key, &v)?;
        }
    }
    apply_sets(&mut sc, &common.set)?;
    if let Some(n) = &common.name {
        sc.set("name", n)?;
    }
    if common.no_svg {
        sc.svg = false;
    }
    sc.validate()?;
    Ok(sc)
}

fn apply_sets(sc: &mut Scenario, sets: &[String]) -> Result<()> {
    for s in sets {
        let (k, v) = s.split_once('=').ok_or_else(|| Error::Config {
            key: s.clone(),
            msg: "expected KEY=VALUE".into(),
        })?;
        sc.set(k.trim(), v)?;
    }
    Ok(())
}

/// Parses `args` (program name first), runs, and returns the exit status.
/// Diagnostics go to `err`, summaries to `out`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    match dispatch(cli.command, &out_dir, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "surgekit: error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs with the process arguments and standard streams.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn dispatch(cmd: Command, out_dir: &Path, out: &mut dyn Write) -> Result<()> {
    let sc = match cmd {
        Command::Map(a) => build(ScenarioKind::Map, &a.common, grid_flags(&a))?,
        Command::Stability(a) => build(ScenarioKind::Stability, &a.common, grid_flags(&a))?,
        Command::Simulate(a) => build(ScenarioKind::Simulate, &a.common, plant_flags(&a))?,
        Command::LimitCycle(a) => build(ScenarioKind::LimitCycle, &a.common, plant_flags(&a))?,
        Command::Tune(a) => build(
            ScenarioKind::Tune,
            &a.common,
            vec![
                ("tune.L", opt(&a.l)),
                ("tune.T", opt(&a.t)),
                ("tune.kind", a.kind.clone()),
                ("tune.step_file", a.step_file.as_ref().map(|p| p.display().to_string())),
                ("tune.step_column", a.column.clone()),
            ],
        )?,
        Command::Closedloop(a) => build(
            ScenarioKind::ClosedLoop,
            &a.common,
            vec![
                ("controller.kind", a.controller.clone()),
                ("disturbance.target", opt(&a.target)),
                ("controller.gamma", opt(&a.gamma)),
                ("sim.dt", opt(&a.dt)),
                ("sim.t_end", opt(&a.t_end)),
                ("observe.compressor", a.observe.then(|| "true".to_string())),
            ],
        )?,
        Command::Averaging(a) => build(
            ScenarioKind::Averaging,
            &a.common,
            vec![
                ("averaging.k_lo", opt(&a.lo)),
                ("averaging.k_hi", opt(&a.hi)),
                ("averaging.n", opt(&a.n)),
                ("averaging.gamma", opt(&a.gamma)),
                ("averaging.r", opt(&a.r)),
                ("averaging.k3", opt(&a.k3)),
                ("averaging.mode", a.mode.clone()),
            ],
        )?,
        Command::Run(a) => {
            let mut sc = resolve_scenario(&a.scenario)?;
            apply_sets(&mut sc, &a.set)?;
            sc.validate()?;
            sc
        }
    };
    execute(&sc, out_dir, out)
}

fn grid_flags(a: &GridArgs) -> Overrides {
    vec![("grid.lo", opt(&a.lo)), ("grid.hi", opt(&a.hi)), ("grid.n", opt(&a.n))]
}

fn plant_flags(a: &PlantArgs) -> Overrides {
    vec![
        ("plant.flow", opt(&a.flow)),
        ("plant.g", opt(&a.g)),
        ("plant.phi0", opt(&a.phi0)),
        ("plant.psi0", opt(&a.psi0)),
        ("sim.dt", opt(&a.dt)),
        ("sim.t_end", opt(&a.t_end)),
        ("limit_cycle.settle_fraction", opt(&a.settle_fraction)),
        ("limit_cycle.tol", opt(&a.tol)),
    ]
}

struct Sink<'a> {
    dir: &'a Path,
    name: &'a str,
    svg: bool,
    out: &'a mut dyn Write,
}

impl Sink<'_> {
    fn path(&self, suffix: &str, ext: &str) -> PathBuf {
        self.dir.join(format!("{}{suffix}.{ext}", self.name))
    }

    fn line(&mut self, text: impl AsRef<str>) -> Result<()> {
        writeln!(self.out, "{}", text.as_ref())?;
        Ok(())
    }

    fn csv<T: crate::output::ToCsv + ?Sized>(&mut self, suffix: &str, data: &T) -> Result<()> {
        let p = self.path(suffix, "csv");
        write_csv(data, &p)?;
        self.line(format!("wrote {}", p.display()))
    }

    fn plot(&mut self, suffix: &str, series: &[Series], spec: &PlotSpec) -> Result<()> {
        if !self.svg {
            return Ok(());
        }
        let p = self.path(suffix, "svg");
        render_svg(series, spec, &p)?;
        self.line(format!("wrote {}", p.display()))
    }
}

fn col(traj: &Trajectory, name: &str) -> Vec<f64> {
    traj.column(name).unwrap_or_default()
}

fn time_series(traj: &Trajectory, names: &[&str]) -> Vec<Series> {
    let t = traj.times();
    names
        .iter()
        .map(|n| Series::new(*n, t.clone(), col(traj, n)))
        .collect()
}

/// Runs a validated scenario, writing its files under `out_dir` and summary
/// lines to `out`.
pub fn execute(sc: &Scenario, out_dir: &Path, out: &mut dyn Write) -> Result<()> {
    sc.validate()?;
    let mut sink = Sink {
        dir: out_dir,
        name: &sc.name,
        svg: sc.svg,
        out,
    };
    sink.line(format!("scenario {} ({})", sc.name, sc.kind.as_str()))?;
    match sc.kind {
        ScenarioKind::Map => run_map(sc, &mut sink),
        ScenarioKind::Stability => run_stability(sc, &mut sink),
        ScenarioKind::Simulate | ScenarioKind::LimitCycle => run_plant(sc, &mut sink),
        ScenarioKind::Tune => run_tune(sc, &mut sink),
        ScenarioKind::ClosedLoop => run_closed_loop(sc, &mut sink),
        ScenarioKind::Averaging => run_averaging(sc, &mut sink),
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn run_map(sc: &Scenario, sink: &mut Sink) -> Result<()> {
    let map = &sc.compressor.map;
    let mut rows = Vec::with_capacity(sc.grid.n);
    for phi in grid(sc.grid.lo, sc.grid.hi, sc.grid.n) {
        rows.push(vec![phi, map.pressure_rise(phi)?, map.slope_at(phi)?]);
    }
    let peak = rows
        .iter()
        .max_by(|a, b| a[1].total_cmp(&b[1]))
        .expect("grid has at least two points");
    sink.line(format!("peak pressure rise {:.6} at phi = {:.6}", peak[1], peak[0]))?;
    let table = Table {
        header: vec!["phi".into(), "psi_c".into(), "slope".into()],
        rows: rows.clone(),
    };
    sink.csv("", &table)?;
    let phi: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let psi: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    sink.plot(
        "",
        &[Series::new("psi_c", phi, psi)],
        &PlotSpec::lines("Compressor map", "phi", "psi_c"),
    )
}

fn run_stability(sc: &Scenario, sink: &mut Sink) -> Result<()> {
    let rows = stability_scan(&sc.compressor, sc.grid.lo, sc.grid.hi, sc.grid.n)?;
    let boundary = surge_boundary(&sc.compressor)?;
    let negative = rows.iter().filter(|r| r.discriminant < 0.0).count();
    let unstable = rows
        .iter()
        .filter(|r| r.classification == FocusClass::UnstableFocus)
        .count();
    sink.line(format!("surge boundary phi* = {boundary:.6}"))?;
    sink.line(format!("negative discriminant at {negative} of {} points", rows.len()))?;
    sink.line(format!("unstable focus at {unstable} of {} points", rows.len()))?;
    sink.csv("", &rows[..])?;
    let phi: Vec<f64> = rows.iter().map(|r| r.phi).collect();
    sink.plot(
        "",
        &[
            Series::new("real part", phi.clone(), rows.iter().map(|r| r.real_part).collect()),
            Series::new("discriminant", phi, rows.iter().map(|r| r.discriminant).collect()),
        ],
        &PlotSpec::lines("Equilibrium stability", "phi", "value"),
    )
}

fn run_plant(sc: &Scenario, sink: &mut Sink) -> Result<()> {
    let map = &sc.compressor.map;
    let g = match sc.plant.g {
        Some(g) => g,
        None => throttle_from_flow(map, sc.plant.flow)?,
    };
    let eq = equilibrium_from_throttle(map, g)?;
    let init = match (sc.plant.phi0, sc.plant.psi0) {
        (Some(phi), Some(psi)) => [phi, psi],
        _ => [eq.phi + sc.plant.perturb_phi, eq.psi + sc.plant.perturb_psi],
    };
    sink.line(format!(
        "throttle g = {g:.6}, equilibrium ({:.6}, {:.6}), start ({:.6}, {:.6})",
        eq.phi, eq.psi, init[0], init[1]
    ))?;
    let sys = GreitzerSystem::new(map.clone(), sc.compressor.params(g));
    let traj = integrate(&sys, &init, sc.dt(), sc.t_end())?;
    let last = traj.last_row().expect("trajectory has an initial row");
    sink.line(format!("final state ({:.6}, {:.6}) at t = {}", last[1], last[2], last[0]))?;

    let window = ((5.0 / sc.dt()).ceil() as usize).min(traj.len());
    match steady_state_of(&traj, window, 1e-3) {
        Some(ss) => sink.line(format!("steady state ({:.6}, {:.6})", ss[0], ss[1]))?,
        None => sink.line("no steady state")?,
    }
    if sc.kind == ScenarioKind::LimitCycle {
        let rep = detect_limit_cycle(&traj, sc.settle_fraction, sc.cycle_tol)?;
        sink.line(format!(
            "limit cycle detected = {}, amplitude phi = {:.6}, amplitude psi = {:.6}, period = {:.4}, cycles = {}",
            rep.detected, rep.amplitude_phi, rep.amplitude_psi, rep.period, rep.cycles_analyzed
        ))?;
    }
    sink.csv("", &traj.decimated(sc.sim.decimate))?;
    sink.plot(
        "",
        &time_series(&traj, &["phi", "psi"]),
        &PlotSpec::lines("Surge model", "t", "value"),
    )?;
    sink.plot(
        "_phase",
        &[Series::new("trajectory", col(&traj, "phi"), col(&traj, "psi"))],
        &PlotSpec::phase("Phase plane"),
    )
}

fn run_tune(sc: &Scenario, sink: &mut Sink) -> Result<()> {
    let (l, t) = match &sc.tune.step_file {
        Some(path) => {
            let step = read_trajectory_csv(Path::new(path))?;
            let (l, t) = extract_lt(&step, &sc.tune.step_column)?;
            sink.line(format!("measured L = {l:.6}, T = {t:.6} from {path}"))?;
            (l, t)
        }
        None => (sc.tune.l, sc.tune.t),
    };
    let g = zn_gains(l, t, sc.tune.kind)?;
    sink.line(format!("Kp = {:.4}, Ki = {:.4}, Kd = {:.4}", g.kp, g.ki, g.kd))?;
    match g.ti {
        Some(ti) => sink.line(format!("Ti = {ti:.6}, Td = {:.6}", g.td))?,
        None => sink.line(format!("no integral action, Td = {:.6}", g.td))?,
    }
    let table = Table {
        header: ["L", "T", "kp", "ki", "kd", "td"].map(String::from).to_vec(),
        rows: vec![vec![l, t, g.kp, g.ki, g.kd, g.td]],
    };
    sink.csv("", &table)
}

fn run_closed_loop(sc: &Scenario, sink: &mut Sink) -> Result<()> {
    let cl = sc.closed_loop();
    let traj = simulate_closed_loop(&cl)?;
    let c = &cl.controller;
    match c.kind {
        ControllerKind::Adaptive => sink.line(format!(
            "controller adaptive, gamma = {}, k(0) = ({}, {}, {})",
            c.gamma, c.k1, c.k2, c.k3
        ))?,
        _ => sink.line(format!(
            "controller {}, kp = {}, ki = {}, kd = {}",
            c.kind.as_str(),
            c.kp,
            c.ki,
            c.kd
        ))?,
    }
    let y = col(&traj, "y");
    let co = col(&traj, "co");
    let last = traj.last_row().expect("trajectory has an initial row");
    let at = |n: &str| last[traj.column_index(n).expect("loop column")];
    sink.line(format!(
        "final y = {:.6}, |y - r| = {:.3e}, co = {:.6}",
        at("y"),
        (at("y") - c.reference).abs(),
        at("co")
    ))?;
    let k0 = [c.k1, c.k2, c.k3];
    let excursion = ["k1", "k2", "k3"]
        .iter()
        .zip(k0)
        .flat_map(|(n, k)| col(&traj, n).into_iter().map(move |v| (v - k).abs()))
        .fold(0.0, f64::max);
    if c.kind == ControllerKind::Adaptive {
        sink.line(format!(
            "final k = ({:.6}, {:.6}, {:.6})",
            at("k1"),
            at("k2"),
            at("k3")
        ))?;
        sink.line(format!("max parameter excursion = {excursion:.6}"))?;
    }
    let fold = |v: &[f64], f: fn(f64, f64) -> f64, init: f64| v.iter().cloned().fold(init, f);
    sink.line(format!(
        "co range [{:.6}, {:.6}]",
        fold(&co, f64::min, f64::INFINITY),
        fold(&co, f64::max, f64::NEG_INFINITY)
    ))?;
    let y_min = fold(&y, f64::min, f64::INFINITY);
    if y_min < EXCURSION_LEVEL {
        sink.line(format!("EXCURSION: y fell to {y_min:.6}, below {EXCURSION_LEVEL}"))?;
    } else {
        sink.line(format!("no excursion below {EXCURSION_LEVEL} (min y = {y_min:.6})"))?;
    }

    sink.csv("", &traj.decimated(sc.sim.decimate))?;
    let plot = traj.decimated(sc.sim.decimate);
    sink.plot(
        "_y",
        &time_series(&plot, &["y", "ym", "d"]),
        &PlotSpec::lines("Flow", "t", "flow"),
    )?;
    sink.plot(
        "_co",
        &time_series(&plot, &["co", "x"]),
        &PlotSpec::lines("Valve", "t", "flow"),
    )?;
    if c.kind == ControllerKind::Adaptive {
        sink.plot(
            "_k",
            &time_series(&plot, &["k1", "k2", "k3"]),
            &PlotSpec::lines("Controller parameters", "t", "k"),
        )?;
    }
    if cl.observe_compressor {
        sink.plot(
            "_phase",
            &[Series::new("compressor", col(&plot, "phi"), col(&plot, "psi"))],
            &PlotSpec::phase("Observed compressor"),
        )?;
    }
    Ok(())
}

fn run_averaging(sc: &Scenario, sink: &mut Sink) -> Result<()> {
    let a = &sc.averaging;
    let mode = if a.saturated {
        ActuatorMode::Saturated
    } else {
        ActuatorMode::Linear
    };
    let points = parameter_grid(a.k_lo, a.k_hi, a.n, a.k3, a.r, a.gamma);
    let rows = stability_verdict(&points, mode)?;
    let stable = rows.iter().filter(|r| r.stable).count();
    let max_eig = rows
        .iter()
        .map(|r| r.eigenvalues[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let min_eig = rows
        .iter()
        .map(|r| r.eigenvalues[2])
        .fold(f64::INFINITY, f64::min);
    sink.line(format!("stable at {stable} of {} points", rows.len()))?;
    sink.line(format!("largest eigenvalue {max_eig:.3e}, most negative {min_eig:.6e}"))?;
    sink.csv("", &rows[..])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_in(dir: &Path, args: &[&str]) -> (i32, String, String) {
        let mut argv = vec!["surgekit".to_string()];
        argv.extend(args.iter().map(|s| s.to_string()));
        argv.push("--out-dir".into());
        argv.push(dir.display().to_string());
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let (code, _, err) = run_in(dir.path(), &["frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(!err.is_empty());
    }

    #[test]
    fn help_exits_zero() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run_with(["surgekit", "--help"], &mut out, &mut err), EXIT_OK);
        assert!(String::from_utf8(out).unwrap().contains("closedloop"));
    }

    #[test]
    fn bad_config_has_its_own_code() {
        let dir = tempfile::tempdir().unwrap();
        let (code, _, err) = run_in(dir.path(), &["closedloop", "--gamma", "-1"]);
        assert_eq!(code, EXIT_CONFIG);
        assert!(err.contains("controller.gamma"), "{err}");
    }

    #[test]
    fn model_errors_have_their_own_code() {
        let dir = tempfile::tempdir().unwrap();
        let (code, _, err) = run_in(dir.path(), &["simulate", "--g", "1e-9", "--t-end", "1"]);
        assert_eq!(code, EXIT_MODEL, "{err}");
    }

    #[test]
    fn missing_step_file_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope.csv");
        let (code, _, _) = run_in(dir.path(), &["tune", "--step-file", missing.to_str().unwrap()]);
        assert_eq!(code, EXIT_IO);
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let (code, _, err) = run_in(dir.path(), &["stability", "--scenario", "fig10"]);
        assert_eq!(code, EXIT_CONFIG);
        assert!(err.contains("kind"));
    }

    #[test]
    fn tune_prints_gains() {
        let dir = tempfile::tempdir().unwrap();
        let (code, out, _) = run_in(
            dir.path(),
            &["tune", "--L", "0.213", "--T", "1.79", "--kind", "PID"],
        );
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("Kp = 10.0845"), "{out}");
        assert!(out.contains("Kd = 1.0740"), "{out}");
    }
}
