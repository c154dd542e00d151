//! Scenario files: `key = value` lines, `#` comments, `[section]` headers.
//!
//! A key inside a section is addressed as `section.key`; keys may also be
//! written fully qualified at top level. Unknown keys are rejected.
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `name` | `default` | output file stem |
//! | `kind` | `closedloop` | `map`, `stability`, `simulate`, `limit-cycle`, `tune`, `closedloop`, `averaging` |
//! | `compressor.a`, `compressor.b` | 0.8, 1.25 | surge-model gains |
//! | `grid.lo`, `grid.hi`, `grid.n` | 0.01, 0.79, 1000 | flow grid for `map` and `stability` |
//! | `plant.flow` | 0.4 | equilibrium flow that sets the throttle `g` |
//! | `plant.g` | unset | explicit throttle (overrides `plant.flow`) |
//! | `plant.phi0`, `plant.psi0` | unset | explicit initial state |
//! | `plant.perturb_phi`, `plant.perturb_psi` | 0.01, 0.01 | offset from equilibrium when no initial state is given |
//! | `sim.dt` | 0.01 plant / 0.001 loop | RK4 step |
//! | `sim.t_end` | 100 plant / 60 loop | run length |
//! | `sim.decimate` | 1 | keep every n-th row in CSV output |
//! | `limit_cycle.settle_fraction`, `limit_cycle.tol` | 0.5, 0.01 | cycle detection |
//! | `tune.L`, `tune.T`, `tune.kind` | 0.213, 1.79, PID | reaction-curve tuning |
//! | `tune.step_file` | unset | CSV step response (`t` first) to measure `(L, T)` from |
//! | `tune.step_column` | `y` | column of `tune.step_file` holding the response |
//! | `controller.kind` | adaptive | `fixed-pd`, `fixed-pid`, `adaptive` |
//! | `controller.kp`, `.ki`, `.kd` | 10, 0, 0.7 | fixed gains |
//! | `controller.k1`, `.k2`, `.k3` | 10, 10, 0.7 | initial adaptive gains |
//! | `controller.gamma` | 1 | adaptation gain |
//! | `controller.reference` | 0.55 | set point |
//! | `valve.tau`, `valve.min`, `valve.max` | 2, 0.05, 0.25 | recycle valve |
//! | `disturbance.target`, `.tau`, `.initial` | 0.35, 1, 0.50 | upstream flow lag |
//! | `observe.compressor` | false | append `phi, psi` driven by the measured flow |
//! | `averaging.k_lo`, `.k_hi`, `.n` | 0.1, 50, 10 | `k1 x k2` grid |
//! | `averaging.k3`, `.gamma`, `.r` | 0.7, 1, 0.55 | fixed coordinates |
//! | `averaging.mode` | linear | `linear` or `saturated` |
//! | `output.svg` | true | also write SVG plots |

use std::path::Path;

use crate::compressor::CompressorModel;
use crate::control::{
    ClosedLoopScenario, ControllerConfig, ControllerKind, DisturbanceProfile, ValveModel, ZnKind,
};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    Map,
    Stability,
    Simulate,
    LimitCycle,
    Tune,
    ClosedLoop,
    Averaging,
}

impl ScenarioKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::Map => "map",
            ScenarioKind::Stability => "stability",
            ScenarioKind::Simulate => "simulate",
            ScenarioKind::LimitCycle => "limit-cycle",
            ScenarioKind::Tune => "tune",
            ScenarioKind::ClosedLoop => "closedloop",
            ScenarioKind::Averaging => "averaging",
        }
    }

    fn is_plant_run(&self) -> bool {
        matches!(self, ScenarioKind::Simulate | ScenarioKind::LimitCycle)
    }
}

impl std::str::FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "map" => ScenarioKind::Map,
            "stability" => ScenarioKind::Stability,
            "simulate" => ScenarioKind::Simulate,
            "limit-cycle" => ScenarioKind::LimitCycle,
            "tune" => ScenarioKind::Tune,
            "closedloop" => ScenarioKind::ClosedLoop,
            "averaging" => ScenarioKind::Averaging,
            other => return Err(format!("unknown scenario kind `{other}`")),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSettings {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlantSettings {
    pub flow: f64,
    pub g: Option<f64>,
    pub phi0: Option<f64>,
    pub psi0: Option<f64>,
    pub perturb_phi: f64,
    pub perturb_psi: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimSettings {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub decimate: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TuneSettings {
    pub l: f64,
    pub t: f64,
    pub kind: ZnKind,
    pub step_file: Option<String>,
    pub step_column: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AveragingSettings {
    pub k_lo: f64,
    pub k_hi: f64,
    pub n: usize,
    pub k3: f64,
    pub gamma: f64,
    pub r: f64,
    pub saturated: bool,
}

/// A fully typed scenario. Build one with [`Scenario::default`] and
/// [`Scenario::set`], or load it with [`load_scenario`].
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub kind: ScenarioKind,
    pub compressor: CompressorModel,
    pub grid: GridSettings,
    pub plant: PlantSettings,
    pub sim: SimSettings,
    pub settle_fraction: f64,
    pub cycle_tol: f64,
    pub tune: TuneSettings,
    pub controller: ControllerConfig,
    pub valve: ValveModel,
    pub disturbance: DisturbanceProfile,
    pub observe_compressor: bool,
    pub averaging: AveragingSettings,
    pub svg: bool,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            name: "default".into(),
            kind: ScenarioKind::ClosedLoop,
            compressor: CompressorModel::default(),
            grid: GridSettings {
                lo: 0.01,
                hi: 0.79,
                n: 1000,
            },
            plant: PlantSettings {
                flow: 0.4,
                g: None,
                phi0: None,
                psi0: None,
                perturb_phi: 0.01,
                perturb_psi: 0.01,
            },
            sim: SimSettings {
                dt: None,
                t_end: None,
                decimate: 1,
            },
            settle_fraction: 0.5,
            cycle_tol: 0.01,
            tune: TuneSettings {
                l: 0.213,
                t: 1.79,
                kind: ZnKind::PID,
                step_file: None,
                step_column: "y".into(),
            },
            controller: ControllerConfig::default(),
            valve: ValveModel::default(),
            disturbance: DisturbanceProfile::default(),
            observe_compressor: false,
            averaging: AveragingSettings {
                k_lo: 0.1,
                k_hi: 50.0,
                n: 10,
                k3: 0.7,
                gamma: 1.0,
                r: 0.55,
                saturated: false,
            },
            svg: true,
        }
    }
}

fn num(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value.parse().map_err(|_| Error::Config {
        key: key.into(),
        msg: format!("expected a number, got `{value}`"),
    })?;
    if !v.is_finite() {
        return Err(Error::Config {
            key: key.into(),
            msg: "must be finite".into(),
        });
    }
    Ok(v)
}

fn count(key: &str, value: &str) -> Result<usize> {
    value.parse().map_err(|_| Error::Config {
        key: key.into(),
        msg: format!("expected a non-negative integer, got `{value}`"),
    })
}

fn flag(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config {
            key: key.into(),
            msg: format!("expected true or false, got `{value}`"),
        }),
    }
}

fn parsed<T: std::str::FromStr<Err = String>>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|msg| Error::Config {
        key: key.into(),
        msg,
    })
}

impl Scenario {
    /// Assigns one fully qualified key. Values are checked for syntax here and
    /// for consistency in [`Scenario::validate`].
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "name" => {
                if v.is_empty() || !v.chars().all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c)) {
                    return Err(Error::Config {
                        key: key.into(),
                        msg: "use letters, digits, `_`, `-` or `.`".into(),
                    });
                }
                self.name = v.to_string();
            }
            "kind" => self.kind = parsed(key, v)?,
            "compressor.a" => self.compressor.a = num(key, v)?,
            "compressor.b" => self.compressor.b = num(key, v)?,
            "grid.lo" => self.grid.lo = num(key, v)?,
            "grid.hi" => self.grid.hi = num(key, v)?,
            "grid.n" => self.grid.n = count(key, v)?,
            "plant.flow" => self.plant.flow = num(key, v)?,
            "plant.g" => self.plant.g = Some(num(key, v)?),
            "plant.phi0" => self.plant.phi0 = Some(num(key, v)?),
            "plant.psi0" => self.plant.psi0 = Some(num(key, v)?),
            "plant.perturb_phi" => self.plant.perturb_phi = num(key, v)?,
            "plant.perturb_psi" => self.plant.perturb_psi = num(key, v)?,
            "sim.dt" => self.sim.dt = Some(num(key, v)?),
            "sim.t_end" => self.sim.t_end = Some(num(key, v)?),
            "sim.decimate" => self.sim.decimate = count(key, v)?,
            "limit_cycle.settle_fraction" => self.settle_fraction = num(key, v)?,
            "limit_cycle.tol" => self.cycle_tol = num(key, v)?,
            "tune.L" => self.tune.l = num(key, v)?,
            "tune.T" => self.tune.t = num(key, v)?,
            "tune.kind" => self.tune.kind = parsed(key, v)?,
            "tune.step_file" => self.tune.step_file = Some(v.to_string()),
            "tune.step_column" => self.tune.step_column = v.to_string(),
            "controller.kind" => self.controller.kind = parsed::<ControllerKind>(key, v)?,
            "controller.kp" => self.controller.kp = num(key, v)?,
            "controller.ki" => self.controller.ki = num(key, v)?,
            "controller.kd" => self.controller.kd = num(key, v)?,
            "controller.k1" => self.controller.k1 = num(key, v)?,
            "controller.k2" => self.controller.k2 = num(key, v)?,
            "controller.k3" => self.controller.k3 = num(key, v)?,
            "controller.gamma" => self.controller.gamma = num(key, v)?,
            "controller.reference" => self.controller.reference = num(key, v)?,
            "valve.tau" => self.valve.tau = num(key, v)?,
            "valve.min" => self.valve.out_min = num(key, v)?,
            "valve.max" => self.valve.out_max = num(key, v)?,
            "disturbance.target" => self.disturbance.target = num(key, v)?,
            "disturbance.tau" => self.disturbance.tau = num(key, v)?,
            "disturbance.initial" => self.disturbance.initial = num(key, v)?,
            "observe.compressor" => self.observe_compressor = flag(key, v)?,
            "averaging.k_lo" => self.averaging.k_lo = num(key, v)?,
            "averaging.k_hi" => self.averaging.k_hi = num(key, v)?,
            "averaging.n" => self.averaging.n = count(key, v)?,
            "averaging.k3" => self.averaging.k3 = num(key, v)?,
            "averaging.gamma" => self.averaging.gamma = num(key, v)?,
            "averaging.r" => self.averaging.r = num(key, v)?,
            "averaging.mode" => {
                self.averaging.saturated = match v {
                    "linear" => false,
                    "saturated" => true,
                    _ => {
                        return Err(Error::Config {
                            key: key.into(),
                            msg: format!("expected linear or saturated, got `{v}`"),
                        })
                    }
                }
            }
            "output.svg" => self.svg = flag(key, v)?,
            _ => {
                return Err(Error::Config {
                    key: key.into(),
                    msg: "unknown key".into(),
                })
            }
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.sim
            .dt
            .unwrap_or(if self.kind.is_plant_run() { 1e-2 } else { 1e-3 })
    }

    pub fn t_end(&self) -> f64 {
        self.sim
            .t_end
            .unwrap_or(if self.kind.is_plant_run() { 100.0 } else { 60.0 })
    }

    pub fn closed_loop(&self) -> ClosedLoopScenario {
        ClosedLoopScenario {
            controller: self.controller,
            valve: self.valve,
            disturbance: self.disturbance,
            dt: self.dt(),
            t_end: self.t_end(),
            observe_compressor: self.observe_compressor,
            compressor: self.compressor.clone(),
        }
    }

    /// Checks every precondition the selected kind depends on, so that no
    /// configuration error can surface mid-run.
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| Error::Config {
            key: key.into(),
            msg,
        };
        for (key, v) in [("compressor.a", self.compressor.a), ("compressor.b", self.compressor.b)] {
            if !(v > 0.0) {
                return Err(bad(key, format!("must be positive, got {v}")));
            }
        }
        if !(self.dt() > 0.0) {
            return Err(bad("sim.dt", format!("must be positive, got {}", self.dt())));
        }
        if !(self.t_end() > self.dt()) {
            return Err(bad("sim.t_end", format!("must exceed sim.dt, got {}", self.t_end())));
        }
        if self.sim.decimate == 0 {
            return Err(bad("sim.decimate", "must be at least 1".into()));
        }
        let map = &self.compressor.map;
        match self.kind {
            ScenarioKind::Map | ScenarioKind::Stability => {
                if !(map.contains(self.grid.lo) && map.contains(self.grid.hi) && self.grid.lo < self.grid.hi) {
                    return Err(bad(
                        "grid.lo",
                        format!(
                            "need {} < lo < hi < {}, got [{}, {}]",
                            map.domain_lo, map.domain_hi, self.grid.lo, self.grid.hi
                        ),
                    ));
                }
                if self.grid.n < 2 {
                    return Err(bad("grid.n", "must be at least 2".into()));
                }
            }
            ScenarioKind::Simulate | ScenarioKind::LimitCycle => {
                match self.plant.g {
                    Some(g) if !(g > 0.0) => {
                        return Err(bad("plant.g", format!("must be positive, got {g}")))
                    }
                    Some(_) => {}
                    None => {
                        if !map.contains(self.plant.flow) {
                            return Err(bad(
                                "plant.flow",
                                format!("must lie inside the map domain, got {}", self.plant.flow),
                            ));
                        }
                    }
                }
                if self.plant.phi0.is_some() != self.plant.psi0.is_some() {
                    return Err(bad("plant.phi0", "set both plant.phi0 and plant.psi0".into()));
                }
                if let Some(psi0) = self.plant.psi0 {
                    if !(psi0 > 0.0) {
                        return Err(bad("plant.psi0", format!("must be positive, got {psi0}")));
                    }
                }
                if !(self.settle_fraction > 0.0 && self.settle_fraction < 1.0) {
                    return Err(bad(
                        "limit_cycle.settle_fraction",
                        format!("must lie in (0, 1), got {}", self.settle_fraction),
                    ));
                }
                if !(self.cycle_tol > 0.0) {
                    return Err(bad("limit_cycle.tol", format!("must be positive, got {}", self.cycle_tol)));
                }
            }
            ScenarioKind::Tune => {
                if !(self.tune.l > 0.0) {
                    return Err(bad("tune.L", format!("must be positive, got {}", self.tune.l)));
                }
                if !(self.tune.t > 0.0) {
                    return Err(bad("tune.T", format!("must be positive, got {}", self.tune.t)));
                }
                self.valve.validate()?;
            }
            ScenarioKind::ClosedLoop => self.closed_loop().validate()?,
            ScenarioKind::Averaging => {
                let a = &self.averaging;
                if !(a.k_lo >= 0.0 && a.k_lo <= a.k_hi) {
                    return Err(bad("averaging.k_lo", format!("need 0 <= k_lo <= k_hi, got {}", a.k_lo)));
                }
                if a.n == 0 {
                    return Err(bad("averaging.n", "must be at least 1".into()));
                }
                if !(a.k3 >= 0.0) {
                    return Err(bad("averaging.k3", format!("must be non-negative, got {}", a.k3)));
                }
                if !(a.gamma > 0.0) {
                    return Err(bad("averaging.gamma", format!("must be positive, got {}", a.gamma)));
                }
            }
        }
        // The controller block is only used by closed-loop runs, but a wrong
        // value there is still a typo worth reporting.
        self.controller.validate()
    }
}

/// Parses scenario text. The result is validated.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut sc = Scenario::default();
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| Error::Parse {
                line: line_no,
                msg: "unterminated section header".into(),
            })?;
            let name = name.trim();
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("bad section name `{name}`"),
                });
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                msg: "empty key".into(),
            });
        }
        let full = if section.is_empty() || section == "scenario" {
            key.to_string()
        } else {
            format!("{section}.{key}")
        };
        sc.set(&full, value)?;
    }
    sc.validate()?;
    Ok(sc)
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}

/// Scenario files shipped with the crate, by name.
pub const BUILTIN: &[(&str, &str)] = &[
    ("fig3_4", include_str!("../scenarios/fig3_4.scn")),
    ("fig6", include_str!("../scenarios/fig6.scn")),
    ("fig7", include_str!("../scenarios/fig7.scn")),
    ("fig10", include_str!("../scenarios/fig10.scn")),
    ("fig12", include_str!("../scenarios/fig12.scn")),
    ("fig14", include_str!("../scenarios/fig14.scn")),
    ("fig15", include_str!("../scenarios/fig15.scn")),
    ("zn", include_str!("../scenarios/zn.scn")),
    ("avg", include_str!("../scenarios/avg.scn")),
    ("surge", include_str!("../scenarios/surge.scn")),
    ("map", include_str!("../scenarios/map.scn")),
];

/// Resolves a shipped scenario name (`fig11` and `fig13` alias the runs that
/// produce those parameter plots) or a file path.
pub fn resolve_scenario(name_or_path: &str) -> Result<Scenario> {
    let alias = match name_or_path {
        "fig11" => "fig10",
        "fig13" => "fig12",
        "fig3" | "fig4" => "fig3_4",
        other => other,
    };
    if let Some((_, text)) = BUILTIN.iter().find(|(n, _)| *n == alias) {
        return parse_scenario(text);
    }
    let path = Path::new(name_or_path);
    if path.exists() {
        return load_scenario(path);
    }
    Err(Error::Config {
        key: "scenario".into(),
        msg: format!("`{name_or_path}` is neither a shipped scenario nor a readable file"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let sc = parse_scenario("").unwrap();
        assert_eq!(sc, Scenario::default());
        assert_eq!(sc.name, "default");
    }

    #[test]
    fn sections_and_comments() {
        let sc = parse_scenario(
            "# comment\nname = demo\nkind = closedloop\n\n[disturbance]\ntarget = 0.45 # inline\n\
             tau = 1\n[controller]\nkind = adaptive\ngamma = 2\n",
        )
        .unwrap();
        assert_eq!(sc.name, "demo");
        assert_eq!(sc.disturbance.target, 0.45);
        assert_eq!(sc.controller.gamma, 2.0);
    }

    #[test]
    fn qualified_keys_at_top_level() {
        let sc = parse_scenario("disturbance.target = 0.6\n").unwrap();
        assert_eq!(sc.disturbance.target, 0.6);
    }

    #[test]
    fn negative_gamma_names_the_key() {
        match parse_scenario("[controller]\ngamma = -1\n") {
            Err(Error::Config { key, .. }) => assert_eq!(key, "controller.gamma"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_an_error() {
        match parse_scenario("[controller]\ngama = 1\n") {
            Err(Error::Config { key, msg }) => {
                assert_eq!(key, "controller.gama");
                assert!(msg.contains("unknown"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        assert_eq!(
            parse_scenario("name = a\nthis is not a pair\n"),
            Err(Error::Parse {
                line: 2,
                msg: "expected `key = value`, got `this is not a pair`".into()
            })
        );
        assert!(matches!(
            parse_scenario("\n\n[broken\n"),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn bad_number_is_reported() {
        assert!(matches!(
            parse_scenario("sim.dt = fast\n"),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn kind_specific_validation() {
        assert!(parse_scenario("kind = stability\ngrid.lo = 0.9\n").is_err());
        assert!(parse_scenario("kind = simulate\nplant.psi0 = -0.2\nplant.phi0 = 0.5\n").is_err());
        assert!(parse_scenario("kind = simulate\nplant.phi0 = 0.5\n").is_err());
        assert!(parse_scenario("kind = tune\ntune.L = 0\n").is_err());
        assert!(parse_scenario("kind = averaging\naveraging.gamma = 0\n").is_err());
        assert!(parse_scenario("kind = closedloop\nvalve.min = 0.3\n").is_err());
    }

    #[test]
    fn plant_runs_default_to_coarser_step() {
        let sc = parse_scenario("kind = limit-cycle\n").unwrap();
        assert_eq!(sc.dt(), 1e-2);
        let sc = parse_scenario("kind = closedloop\n").unwrap();
        assert_eq!(sc.dt(), 1e-3);
    }

    #[test]
    fn shipped_scenarios_parse() {
        for (name, text) in BUILTIN {
            let sc = parse_scenario(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(&sc.name, name);
        }
    }

    #[test]
    fn fig10_file_matches_expectations() {
        let sc = resolve_scenario("fig10").unwrap();
        assert_eq!(sc.kind, ScenarioKind::ClosedLoop);
        assert_eq!(sc.disturbance.target, 0.35);
        assert_eq!(sc.disturbance.tau, 1.0);
        assert_eq!(sc.controller.kind, ControllerKind::Adaptive);
        assert_eq!(resolve_scenario("fig11").unwrap().name, "fig10");
    }

    #[test]
    fn unknown_scenario_name() {
        assert!(resolve_scenario("fig99").is_err());
    }
}
