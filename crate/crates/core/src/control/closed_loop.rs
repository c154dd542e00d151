use super::law::{mras_update, reference_model_rhs, resolve_control_signal, sensitivity_rhs};
use super::{
    disturbance_rhs, plant_output, saturate, valve_rhs, ControllerConfig, ControllerKind,
    DisturbanceProfile, LoopState, ValveModel,
};
use crate::compressor::{
    equilibrium_from_throttle, greitzer_rhs, throttle_from_flow, CompressorModel, PlantState,
};
use crate::error::{Error, Result};
use crate::ode::{integrate_with, OdeSystem, Trajectory};

/// Recorded signals, after the leading `t` column.
pub const LOOP_COLUMNS: [&str; 10] = ["d", "u", "x", "co", "y", "ym", "e", "k1", "k2", "k3"];

/// Everything needed for one closed-loop run.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedLoopScenario {
    pub controller: ControllerConfig,
    pub valve: ValveModel,
    pub disturbance: DisturbanceProfile,
    pub dt: f64,
    pub t_end: f64,
    /// Integrate the surge model alongside, driven by the measured flow.
    pub observe_compressor: bool,
    pub compressor: CompressorModel,
}

impl Default for ClosedLoopScenario {
    fn default() -> Self {
        Self {
            controller: ControllerConfig::default(),
            valve: ValveModel::default(),
            disturbance: DisturbanceProfile::default(),
            dt: 1e-3,
            t_end: 60.0,
            observe_compressor: false,
            compressor: CompressorModel::default(),
        }
    }
}

impl ClosedLoopScenario {
    pub fn with_disturbance(target: f64) -> Self {
        let mut s = Self::default();
        s.disturbance.target = target;
        s
    }

    pub fn validate(&self) -> Result<()> {
        self.controller.validate()?;
        self.valve.validate()?;
        self.disturbance.validate()?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config {
                key: "sim.dt".into(),
                msg: format!("must be positive, got {}", self.dt),
            });
        }
        if !(self.t_end > self.dt && self.t_end.is_finite()) {
            return Err(Error::Config {
                key: "sim.t_end".into(),
                msg: format!("must exceed the time step, got {}", self.t_end),
            });
        }
        if self.observe_compressor {
            let y0 = self.initial_output();
            if !self.compressor.map.contains(y0) {
                return Err(Error::Config {
                    key: "disturbance.initial".into(),
                    msg: format!("initial inlet flow {y0} is outside the compressor map"),
                });
            }
        }
        Ok(())
    }

    /// Inlet flow at `t = 0`: the valve starts at its lower limit.
    pub fn initial_output(&self) -> f64 {
        plant_output(self.disturbance.initial, self.valve.out_min)
    }

    /// Initial loop state. The reference model and regressor filters start at
    /// rest on the initial measurement, so the tracking error is exactly zero.
    pub fn initial_state(&self) -> LoopState {
        let y0 = self.initial_output();
        let c = &self.controller;
        LoopState {
            x: self.valve.out_min,
            d: self.disturbance.initial,
            ym1: y0,
            ym2: 0.0,
            v1: c.reference,
            v2: -y0,
            v3: 0.0,
            k1: c.k1,
            k2: c.k2,
            k3: c.k3,
            e_int: 0.0,
        }
    }
}

/// Signals derived from the state at one instant.
#[derive(Clone, Copy, Debug)]
struct Signals {
    d_dot: f64,
    u: f64,
    co: f64,
    y: f64,
    y_dot: f64,
    e: f64,
    linear: bool,
}

/// The closed loop as an ODE system over [`LoopState`] (plus `phi, psi` when observing).
#[derive(Clone, Debug)]
pub struct ClosedLoopSystem {
    scenario: ClosedLoopScenario,
}

impl ClosedLoopSystem {
    pub fn new(scenario: ClosedLoopScenario) -> Result<Self> {
        scenario.validate()?;
        Ok(Self { scenario })
    }

    pub fn scenario(&self) -> &ClosedLoopScenario {
        &self.scenario
    }

    pub fn initial_vector(&self) -> Result<Vec<f64>> {
        let mut v = self.scenario.initial_state().to_array().to_vec();
        if self.scenario.observe_compressor {
            let map = &self.scenario.compressor.map;
            let y0 = self.scenario.initial_output();
            let eq = equilibrium_from_throttle(map, throttle_from_flow(map, y0)?)?;
            v.extend([eq.phi, eq.psi]);
        }
        Ok(v)
    }

    // Evaluation order: d' -> valve mode -> u -> co -> y -> y' -> e.
    fn signals(&self, s: &LoopState) -> Signals {
        let sc = &self.scenario;
        let r = sc.controller.reference;
        let d_dot = disturbance_rhs(s.d, &sc.disturbance);
        let linear = sc.valve.mode(s.x).is_linear();
        let co = saturate(s.x, &sc.valve);
        let y = plant_output(s.d, co);
        let u = resolve_control_signal(r, y, &sc.controller, s, d_dot, &sc.valve);
        let y_dot = if linear {
            d_dot + valve_rhs(s.x, u, &sc.valve)
        } else {
            d_dot
        };
        Signals {
            d_dot,
            u,
            co,
            y,
            y_dot,
            e: y - s.ym1,
            linear,
        }
    }

    /// Residual of the control law with the resolved `u` and implied `y'`.
    pub fn algebraic_residual(&self, state: &[f64]) -> f64 {
        let s = LoopState::from_slice(state);
        let sig = self.signals(&s);
        let c = &self.scenario.controller;
        let r = c.reference;
        let law = match c.kind {
            ControllerKind::Adaptive => s.k1 * r - s.k2 * sig.y - s.k3 * sig.y_dot,
            ControllerKind::FixedPd => c.kp * (r - sig.y) - c.kd * sig.y_dot,
            ControllerKind::FixedPid => c.kp * (r - sig.y) + c.ki * s.e_int - c.kd * sig.y_dot,
        };
        sig.u - law
    }
}

impl OdeSystem for ClosedLoopSystem {
    fn dimension(&self) -> usize {
        LoopState::LEN + if self.scenario.observe_compressor { 2 } else { 0 }
    }

    fn rhs(&self, _t: f64, state: &[f64], out: &mut [f64]) -> Result<()> {
        let sc = &self.scenario;
        let r = sc.controller.reference;
        let s = LoopState::from_slice(state);
        let sig = self.signals(&s);

        let (dym1, dym2) = reference_model_rhs(s.ym1, s.ym2, r);
        let (dv1, dv2, dv3) = sensitivity_rhs(s.v1, s.v2, s.v3, r, sig.y, sig.y_dot);
        let (mut dk1, mut dk2, mut dk3) = if sc.controller.kind == ControllerKind::Adaptive {
            mras_update(sig.e, s.v1, s.v2, s.v3, sc.controller.gamma, sig.linear)
        } else {
            (0.0, 0.0, 0.0)
        };
        // Projection onto non-negative gains.
        for (k, dk) in [(s.k1, &mut dk1), (s.k2, &mut dk2), (s.k3, &mut dk3)] {
            if k <= 0.0 && *dk < 0.0 {
                *dk = 0.0;
            }
        }
        let de_int = if sc.controller.kind == ControllerKind::FixedPid {
            r - sig.y
        } else {
            0.0
        };

        out[..LoopState::LEN].copy_from_slice(&[
            valve_rhs(s.x, sig.u, &sc.valve),
            sig.d_dot,
            dym1,
            dym2,
            dv1,
            dv2,
            dv3,
            dk1,
            dk2,
            dk3,
            de_int,
        ]);

        if sc.observe_compressor {
            let map = &sc.compressor.map;
            let g = throttle_from_flow(map, sig.y)?;
            let plant = PlantState::new(state[LoopState::LEN], state[LoopState::LEN + 1]);
            let d = greitzer_rhs(plant, &sc.compressor.params(g), map)?;
            out[LoopState::LEN] = d.phi;
            out[LoopState::LEN + 1] = d.psi;
        }
        Ok(())
    }

    fn output_names(&self) -> Vec<String> {
        let mut names: Vec<String> = LOOP_COLUMNS.iter().map(|s| s.to_string()).collect();
        if self.scenario.observe_compressor {
            names.extend(["phi".to_string(), "psi".to_string()]);
        }
        names
    }

    fn outputs(&self, _t: f64, state: &[f64], out: &mut Vec<f64>) -> Result<()> {
        let s = LoopState::from_slice(state);
        let sig = self.signals(&s);
        out.extend_from_slice(&[
            s.d, sig.u, s.x, sig.co, sig.y, s.ym1, sig.e, s.k1, s.k2, s.k3,
        ]);
        if self.scenario.observe_compressor {
            out.extend_from_slice(&state[LoopState::LEN..LoopState::LEN + 2]);
        }
        Ok(())
    }
}

/// Integrates the closed loop and records `t,d,u,x,co,y,ym,e,k1,k2,k3[,phi,psi]`.
pub fn simulate_closed_loop(scenario: &ClosedLoopScenario) -> Result<Trajectory> {
    let sys = ClosedLoopSystem::new(scenario.clone())?;
    let x0 = sys.initial_vector()?;
    integrate_with(&sys, &x0, scenario.dt, scenario.t_end, |_, state| {
        for k in &mut state[7..10] {
            if *k < 0.0 {
                *k = 0.0;
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_follow_schema() {
        let mut sc = ClosedLoopScenario::default();
        sc.t_end = 0.01;
        let traj = simulate_closed_loop(&sc).unwrap();
        assert_eq!(
            traj.columns().join(","),
            "t,d,u,x,co,y,ym,e,k1,k2,k3"
        );
        sc.observe_compressor = true;
        let traj = simulate_closed_loop(&sc).unwrap();
        assert!(traj.columns().join(",").ends_with("k3,phi,psi"));
    }

    #[test]
    fn initial_error_is_zero() {
        let sc = ClosedLoopScenario::default();
        let sys = ClosedLoopSystem::new(sc).unwrap();
        let x0 = sys.initial_vector().unwrap();
        let mut out = Vec::new();
        sys.outputs(0.0, &x0, &mut out).unwrap();
        assert_eq!(out[6], 0.0);
        assert!((out[4] - 0.55).abs() < 1e-15);
    }

    #[test]
    fn invalid_config_fails_before_running() {
        let mut sc = ClosedLoopScenario::default();
        sc.controller.gamma = 0.0;
        assert!(matches!(simulate_closed_loop(&sc), Err(Error::Config { .. })));
        let mut sc = ClosedLoopScenario::default();
        sc.dt = -1.0;
        assert!(matches!(simulate_closed_loop(&sc), Err(Error::Config { .. })));
    }

    #[test]
    fn saturated_start_keeps_gains() {
        let sc = ClosedLoopScenario {
            t_end: 5.0,
            ..ClosedLoopScenario::with_disturbance(0.6)
        };
        let traj = simulate_closed_loop(&sc).unwrap();
        for r in traj.rows() {
            assert_eq!(&r[8..11], &[10.0, 10.0, 0.7]);
        }
    }
}
