//! Anti-surge valve loop: actuator, disturbance, fixed and adaptive control laws.
//!
//! The loop measures the compressor inlet flow `y = d + co`, where `d` is the
//! upstream disturbance flow and `co` the saturated recycle-valve flow. The
//! valve is a first-order lag whose linear-mode output `x` is clamped to
//! `[out_min, out_max]`.

mod closed_loop;
mod law;
mod tuning;

pub use closed_loop::{simulate_closed_loop, ClosedLoopScenario, ClosedLoopSystem, LOOP_COLUMNS};
pub use law::{
    control_signal, mras_update, reference_model_rhs, resolve_control_signal, sensitivity_rhs,
    ControllerConfig, ControllerKind,
};
pub use tuning::{extract_lt, zn_gains, ZnGains, ZnKind};

use crate::error::{Error, Result};

/// Recycle valve: `x' = (u - x) / tau`, output clamped to `[out_min, out_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValveModel {
    pub tau: f64,
    pub out_min: f64,
    pub out_max: f64,
}

impl Default for ValveModel {
    fn default() -> Self {
        Self {
            tau: 2.0,
            out_min: 0.05,
            out_max: 0.25,
        }
    }
}

impl ValveModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Config {
                key: "valve.tau".into(),
                msg: format!("must be positive, got {}", self.tau),
            });
        }
        if !(self.out_min > 0.0 && self.out_min < self.out_max && self.out_max.is_finite()) {
            return Err(Error::Config {
                key: "valve.min".into(),
                msg: format!(
                    "need 0 < min < max, got min = {}, max = {}",
                    self.out_min, self.out_max
                ),
            });
        }
        Ok(())
    }

    /// Operating mode for the current linear-mode output. Both limits count as linear.
    pub fn mode(&self, x: f64) -> ActuatorMode {
        if x >= self.out_min && x <= self.out_max {
            ActuatorMode::Linear
        } else {
            ActuatorMode::Saturated
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActuatorMode {
    Linear,
    Saturated,
}

impl ActuatorMode {
    pub fn is_linear(self) -> bool {
        self == ActuatorMode::Linear
    }
}

pub fn valve_rhs(x: f64, u: f64, valve: &ValveModel) -> f64 {
    (u - x) / valve.tau
}

pub fn saturate(x: f64, valve: &ValveModel) -> f64 {
    if x >= valve.out_max {
        valve.out_max
    } else if x <= valve.out_min {
        valve.out_min
    } else {
        x
    }
}

/// Compressor inlet flow: upstream disturbance plus recycled flow.
pub fn plant_output(d: f64, co: f64) -> f64 {
    d + co
}

/// Upstream flow relaxing from `initial` towards `target` with time constant `tau`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DisturbanceProfile {
    pub target: f64,
    pub tau: f64,
    pub initial: f64,
}

impl Default for DisturbanceProfile {
    fn default() -> Self {
        Self {
            target: 0.35,
            tau: 1.0,
            initial: 0.50,
        }
    }
}

impl DisturbanceProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.target >= 0.0 && self.target.is_finite()) {
            return Err(Error::Config {
                key: "disturbance.target".into(),
                msg: format!("must be non-negative, got {}", self.target),
            });
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Config {
                key: "disturbance.tau".into(),
                msg: format!("must be positive, got {}", self.tau),
            });
        }
        if !self.initial.is_finite() {
            return Err(Error::Config {
                key: "disturbance.initial".into(),
                msg: "must be finite".into(),
            });
        }
        Ok(())
    }
}

pub fn disturbance_rhs(d: f64, profile: &DisturbanceProfile) -> f64 {
    (profile.target - d) / profile.tau
}

/// Full closed-loop state.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct LoopState {
    /// Valve linear-mode output.
    pub x: f64,
    /// Disturbance flow.
    pub d: f64,
    /// Reference-model output and its derivative.
    pub ym1: f64,
    pub ym2: f64,
    /// Filtered regressors for `r`, `-y` and `-y'`.
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    /// Integral of the tracking error (fixed PID only).
    pub e_int: f64,
}

impl LoopState {
    pub const LEN: usize = 11;

    pub fn to_array(&self) -> [f64; Self::LEN] {
        [
            self.x, self.d, self.ym1, self.ym2, self.v1, self.v2, self.v3, self.k1, self.k2,
            self.k3, self.e_int,
        ]
    }

    pub fn from_slice(s: &[f64]) -> Self {
        Self {
            x: s[0],
            d: s[1],
            ym1: s[2],
            ym2: s[3],
            v1: s[4],
            v2: s[5],
            v3: s[6],
            k1: s[7],
            k2: s[8],
            k3: s[9],
            e_int: s[10],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::{integrate, OdeSystem};
    use approx::assert_abs_diff_eq;

    #[test]
    fn valve_rhs_examples() {
        let v = ValveModel::default();
        assert_eq!(valve_rhs(0.2, 0.2, &v), 0.0);
        assert_eq!(valve_rhs(0.0, 1.0, &v), 0.5);
    }

    struct ValveStep(ValveModel);
    impl OdeSystem for ValveStep {
        fn dimension(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, s: &[f64], out: &mut [f64]) -> Result<()> {
            out[0] = valve_rhs(s[0], 1.0, &self.0);
            Ok(())
        }
        fn output_names(&self) -> Vec<String> {
            vec!["x".into()]
        }
    }

    #[test]
    fn valve_step_reaches_63_percent_at_tau() {
        let traj = integrate(&ValveStep(ValveModel::default()), &[0.0], 1e-3, 2.0).unwrap();
        let x = traj.last_row().unwrap()[1];
        assert_abs_diff_eq!(x, 0.632, epsilon = 0.01);
    }

    #[test]
    fn saturation_branches() {
        let v = ValveModel::default();
        assert_eq!(saturate(0.3, &v), 0.25);
        assert_eq!(saturate(0.1, &v), 0.1);
        assert_eq!(saturate(0.0, &v), 0.05);
        assert_eq!(saturate(0.25, &v), 0.25);
        assert_eq!(saturate(0.05, &v), 0.05);
    }

    #[test]
    fn mode_boundaries_are_linear() {
        let v = ValveModel::default();
        assert_eq!(v.mode(0.05), ActuatorMode::Linear);
        assert_eq!(v.mode(0.25), ActuatorMode::Linear);
        assert_eq!(v.mode(0.0499), ActuatorMode::Saturated);
        assert_eq!(v.mode(0.2501), ActuatorMode::Saturated);
    }

    #[test]
    fn plant_output_examples() {
        assert_abs_diff_eq!(plant_output(0.35, 0.20), 0.55, epsilon = 1e-15);
        assert_abs_diff_eq!(plant_output(0.6, 0.05), 0.65, epsilon = 1e-15);
        assert_eq!(plant_output(0.4, 0.0), 0.4);
    }

    #[test]
    fn disturbance_examples() {
        let p = DisturbanceProfile {
            target: 0.35,
            tau: 1.0,
            initial: 0.0,
        };
        assert_eq!(disturbance_rhs(0.35, &p), 0.0);
        assert_abs_diff_eq!(disturbance_rhs(0.0, &p), 0.35);
    }

    struct Lag(DisturbanceProfile);
    impl OdeSystem for Lag {
        fn dimension(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, s: &[f64], out: &mut [f64]) -> Result<()> {
            out[0] = disturbance_rhs(s[0], &self.0);
            Ok(())
        }
        fn output_names(&self) -> Vec<String> {
            vec!["d".into()]
        }
    }

    #[test]
    fn disturbance_reaches_95_percent_at_three_tau() {
        let p = DisturbanceProfile {
            target: 0.35,
            tau: 1.0,
            initial: 0.0,
        };
        let traj = integrate(&Lag(p), &[0.0], 1e-3, 3.0).unwrap();
        let d = traj.last_row().unwrap()[1];
        assert!((d / 0.35 - 0.95).abs() <= 0.01 * 0.95);
    }

    #[test]
    fn validation_rejects_bad_values() {
        let mut v = ValveModel::default();
        v.tau = 0.0;
        assert!(v.validate().is_err());
        let v = ValveModel {
            out_min: 0.3,
            ..Default::default()
        };
        assert!(v.validate().is_err());
        let p = DisturbanceProfile {
            tau: -1.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn loop_state_roundtrip() {
        let s = LoopState {
            x: 1.0,
            d: 2.0,
            ym1: 3.0,
            ym2: 4.0,
            v1: 5.0,
            v2: 6.0,
            v3: 7.0,
            k1: 8.0,
            k2: 9.0,
            k3: 10.0,
            e_int: 11.0,
        };
        assert_eq!(LoopState::from_slice(&s.to_array()), s);
    }
}
