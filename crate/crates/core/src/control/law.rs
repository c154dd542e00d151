use super::{ActuatorMode, LoopState, ValveModel};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControllerKind {
    FixedPd,
    FixedPid,
    Adaptive,
}

impl ControllerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ControllerKind::FixedPd => "fixed-pd",
            ControllerKind::FixedPid => "fixed-pid",
            ControllerKind::Adaptive => "adaptive",
        }
    }
}

impl std::str::FromStr for ControllerKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "fixed-pd" | "pd" => Ok(ControllerKind::FixedPd),
            "fixed-pid" | "pid" => Ok(ControllerKind::FixedPid),
            "adaptive" | "mras" => Ok(ControllerKind::Adaptive),
            other => Err(format!(
                "unknown controller kind `{other}` (expected fixed-pd, fixed-pid or adaptive)"
            )),
        }
    }
}

/// Controller selection and gains.
///
/// Fixed kinds use `kp`, `ki`, `kd`; the adaptive kind starts from `k1`, `k2`,
/// `k3` and adapts them with gain `gamma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControllerConfig {
    pub kind: ControllerKind,
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub gamma: f64,
    pub reference: f64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            kind: ControllerKind::Adaptive,
            kp: 10.0,
            ki: 0.0,
            kd: 0.7,
            k1: 10.0,
            k2: 10.0,
            k3: 0.7,
            gamma: 1.0,
            reference: 0.55,
        }
    }
}

impl ControllerConfig {
    /// The fixed PID used for the comparison run: `Kp = 10, Ki = 24, Kd = 1`.
    pub fn fixed_pid(kp: f64, ki: f64, kd: f64) -> Self {
        Self {
            kind: ControllerKind::FixedPid,
            kp,
            ki,
            kd,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let gains = [
            ("controller.kp", self.kp),
            ("controller.ki", self.ki),
            ("controller.kd", self.kd),
            ("controller.k1", self.k1),
            ("controller.k2", self.k2),
            ("controller.k3", self.k3),
        ];
        for (key, v) in gains {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config {
                    key: key.into(),
                    msg: format!("gain must be a finite non-negative number, got {v}"),
                });
            }
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::Config {
                key: "controller.gamma".into(),
                msg: format!("adaptation gain must be positive, got {}", self.gamma),
            });
        }
        if !self.reference.is_finite() {
            return Err(Error::Config {
                key: "controller.reference".into(),
                msg: "must be finite".into(),
            });
        }
        Ok(())
    }
}

/// Control law with `y'` supplied. For the adaptive kind the current
/// parameters are read from `cfg.k1..k3`.
///
/// Fixed kinds put the derivative on the measurement: `u = Kp e + Ki e_int - Kd y'`.
pub fn control_signal(r: f64, y: f64, y_dot: f64, cfg: &ControllerConfig, e_int: f64) -> f64 {
    match cfg.kind {
        ControllerKind::FixedPd => cfg.kp * (r - y) - cfg.kd * y_dot,
        ControllerKind::FixedPid => cfg.kp * (r - y) + cfg.ki * e_int - cfg.kd * y_dot,
        ControllerKind::Adaptive => cfg.k1 * r - cfg.k2 * y - cfg.k3 * y_dot,
    }
}

/// Splits the law into the part independent of `y'` and the gain on `y'`.
fn law_terms(r: f64, y: f64, cfg: &ControllerConfig, state: &LoopState) -> (f64, f64) {
    match cfg.kind {
        ControllerKind::FixedPd => (cfg.kp * (r - y), cfg.kd),
        ControllerKind::FixedPid => (cfg.kp * (r - y) + cfg.ki * state.e_int, cfg.kd),
        ControllerKind::Adaptive => (state.k1 * r - state.k2 * y, state.k3),
    }
}

/// Solves the algebraic loop between `u` and `y' = d' + x'`.
///
/// In linear mode `x' = (u - x)/tau`, so `u (1 + k/tau) = base - k d' + k x / tau`
/// with `k` the derivative gain. When saturated, `co` is constant and `y' = d'`.
pub fn resolve_control_signal(
    r: f64,
    y: f64,
    cfg: &ControllerConfig,
    state: &LoopState,
    d_dot: f64,
    valve: &ValveModel,
) -> f64 {
    let (base, k) = law_terms(r, y, cfg, state);
    match valve.mode(state.x) {
        ActuatorMode::Linear => {
            let denom = 1.0 + k / valve.tau;
            debug_assert!(denom > 0.0, "derivative gain must be non-negative");
            (base - k * d_dot + k * state.x / valve.tau) / denom
        }
        ActuatorMode::Saturated => base - k * d_dot,
    }
}

/// Reference model `25 / (s^2 + 8.5 s + 25)` in controllable form.
pub fn reference_model_rhs(ym1: f64, ym2: f64, r: f64) -> (f64, f64) {
    (ym2, 25.0 * r - 25.0 * ym1 - 8.5 * ym2)
}

/// Sensitivity filters: `r`, `-y` and `-y'` through `1 / (2 s + 1)`.
pub fn sensitivity_rhs(v1: f64, v2: f64, v3: f64, r: f64, y: f64, y_dot: f64) -> (f64, f64, f64) {
    ((r - v1) / 2.0, (-y - v2) / 2.0, (-y_dot - v3) / 2.0)
}

/// MIT-rule parameter derivatives with `e = y - y_m`. Adaptation stops while
/// the valve is saturated.
pub fn mras_update(
    e: f64,
    v1: f64,
    v2: f64,
    v3: f64,
    gamma: f64,
    in_linear_mode: bool,
) -> (f64, f64, f64) {
    if !in_linear_mode {
        return (0.0, 0.0, 0.0);
    }
    (-gamma * e * v1, -gamma * e * v2, -gamma * e * v3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn adaptive_law_examples() {
        let cfg = ControllerConfig::default();
        assert_eq!(control_signal(0.55, 0.55, 0.0, &cfg, 0.0), 0.0);
        assert_abs_diff_eq!(control_signal(0.55, 0.40, 0.0, &cfg, 0.0), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn fixed_pid_example() {
        let cfg = ControllerConfig::fixed_pid(10.0, 24.0, 1.0);
        assert_abs_diff_eq!(control_signal(0.55, 0.45, 0.0, &cfg, 0.0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(control_signal(0.55, 0.45, 0.0, &cfg, 0.5), 13.0, epsilon = 1e-12);
        let pd = ControllerConfig {
            kind: ControllerKind::FixedPd,
            ..cfg
        };
        assert_abs_diff_eq!(control_signal(0.55, 0.45, 0.2, &pd, 9.0), 0.8, epsilon = 1e-12);
    }

    #[test]
    fn reference_model_fixed_point() {
        assert_eq!(reference_model_rhs(0.55, 0.0, 0.55), (0.0, 0.0));
    }

    #[test]
    fn reference_model_poles() {
        // s^2 + 8.5 s + 25 = 0 -> -4.25 +/- i sqrt(25 - 4.25^2)
        let im = (25.0f64 - 4.25 * 4.25).sqrt();
        assert_abs_diff_eq!(im, 2.634, epsilon = 1e-3);
        // The companion matrix [[0, 1], [-25, -8.5]] has these poles.
        let trace = -8.5;
        let det = 25.0;
        assert_abs_diff_eq!(trace / 2.0, -4.25);
        assert_abs_diff_eq!(det - (trace / 2.0f64).powi(2), im * im, epsilon = 1e-12);
        let (a, b) = reference_model_rhs(1.0, 0.0, 0.0);
        assert_eq!((a, b), (0.0, -25.0));
        let (a, b) = reference_model_rhs(0.0, 1.0, 0.0);
        assert_eq!((a, b), (1.0, -8.5));
    }

    #[test]
    fn sensitivity_examples() {
        assert_eq!(sensitivity_rhs(0.55, 0.0, 0.0, 0.55, 0.0, 0.0).0, 0.0);
        assert_abs_diff_eq!(sensitivity_rhs(0.0, 0.0, 0.0, 0.55, 0.0, 0.0).0, 0.275);
        let (_, dv2, dv3) = sensitivity_rhs(0.0, -0.5, 0.3, 0.55, 0.5, 0.0);
        assert_eq!(dv2, 0.0);
        assert!(dv3 < 0.0);
    }

    #[test]
    fn mras_examples() {
        assert_eq!(mras_update(0.3, 1.0, 1.0, 1.0, 2.0, false), (0.0, 0.0, 0.0));
        let (a, b, c) = mras_update(0.0, 1.0, 1.0, 1.0, 2.0, true);
        assert_eq!((a.abs(), b.abs(), c.abs()), (0.0, 0.0, 0.0));
        let (a, b, c) = mras_update(0.1, 0.5, -0.5, 0.0, 1.0, true);
        assert_abs_diff_eq!(a, -0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 0.05, epsilon = 1e-15);
        assert_eq!(c.abs(), 0.0);
    }

    fn state_with(x: f64, k: (f64, f64, f64)) -> LoopState {
        LoopState {
            x,
            k1: k.0,
            k2: k.1,
            k3: k.2,
            ..Default::default()
        }
    }

    #[test]
    fn resolve_without_derivative_gain() {
        let cfg = ControllerConfig::default();
        let valve = ValveModel::default();
        let s = state_with(0.1, (10.0, 10.0, 0.0));
        let u = resolve_control_signal(0.55, 0.5, &cfg, &s, 0.3, &valve);
        assert_abs_diff_eq!(u, 10.0 * 0.55 - 10.0 * 0.5, epsilon = 1e-12);
    }

    #[test]
    fn resolve_hand_example() {
        let cfg = ControllerConfig::default();
        let valve = ValveModel::default();
        let s = state_with(0.1, (10.0, 10.0, 0.7));
        let u = resolve_control_signal(0.55, 0.55, &cfg, &s, 0.0, &valve);
        assert_abs_diff_eq!(u, 0.035 / 1.35, epsilon = 1e-12);
        assert_abs_diff_eq!(u, 0.02593, epsilon = 1e-5);
    }

    #[test]
    fn resolve_saturated_uses_disturbance_rate_only() {
        let cfg = ControllerConfig::default();
        let valve = ValveModel::default();
        let s = state_with(0.01, (10.0, 10.0, 0.7));
        let u = resolve_control_signal(0.55, 0.6, &cfg, &s, -0.2, &valve);
        assert_abs_diff_eq!(u, 5.5 - 6.0 + 0.14, epsilon = 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(ControllerConfig::default().validate().is_ok());
        let bad = ControllerConfig {
            gamma: -1.0,
            ..Default::default()
        };
        match bad.validate() {
            Err(Error::Config { key, .. }) => assert_eq!(key, "controller.gamma"),
            other => panic!("unexpected {other:?}"),
        }
        let bad = ControllerConfig {
            k3: -0.1,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("adaptive".parse::<ControllerKind>(), Ok(ControllerKind::Adaptive));
        assert_eq!("fixed-pid".parse::<ControllerKind>(), Ok(ControllerKind::FixedPid));
        assert!("lqr".parse::<ControllerKind>().is_err());
    }
}
