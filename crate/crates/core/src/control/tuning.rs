//! Ziegler–Nichols open-loop (reaction curve) tuning.

use crate::error::{Error, Result};
use crate::ode::Trajectory;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZnKind {
    P,
    PI,
    PID,
}

impl std::str::FromStr for ZnKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "P" => Ok(ZnKind::P),
            "PI" => Ok(ZnKind::PI),
            "PID" => Ok(ZnKind::PID),
            other => Err(format!("unknown tuning kind `{other}` (expected P, PI or PID)")),
        }
    }
}

/// Gains in both parallel (`kp, ki, kd`) and standard (`kp, ti, td`) form.
/// `ti = None` means no integral action.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZnGains {
    pub kp: f64,
    pub ti: Option<f64>,
    pub td: f64,
    pub ki: f64,
    pub kd: f64,
}

/// Reaction-curve table for dead time `l` and time constant `t`.
pub fn zn_gains(l: f64, t: f64, kind: ZnKind) -> Result<ZnGains> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::Domain {
            what: "dead time L must be positive",
            value: l,
        });
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain {
            what: "time constant T must be positive",
            value: t,
        });
    }
    let (kp, ti, td) = match kind {
        ZnKind::P => (t / l, None, 0.0),
        ZnKind::PI => (0.9 * t / l, Some(l / 0.3), 0.0),
        ZnKind::PID => (1.2 * t / l, Some(2.0 * l), 0.5 * l),
    };
    Ok(ZnGains {
        kp,
        ti,
        td,
        ki: ti.map_or(0.0, |ti| kp / ti),
        kd: kp * td,
    })
}

/// Dead time `L` and time constant `T` from a step response by the tangent
/// at the point of steepest slope.
///
/// The response is normalised by its total change, so `(L, T)` do not depend
/// on the step amplitude. `L` is the tangent's time-axis intercept clamped at
/// zero; `T` is the time from that intercept to where the tangent meets the
/// final level.
pub fn extract_lt(step: &Trajectory, column: &str) -> Result<(f64, f64)> {
    let y = step
        .column(column)
        .ok_or(Error::DegenerateResponse("requested column is missing"))?;
    let t = step.times();
    if y.len() < 3 {
        return Err(Error::DegenerateResponse("need at least three samples"));
    }
    let y0 = y[0];
    let span = y[y.len() - 1] - y0;
    if !(span.abs() > 1e-12 * (1.0 + y0.abs())) {
        return Err(Error::DegenerateResponse("response does not move"));
    }
    let n: Vec<f64> = y.iter().map(|v| (v - y0) / span).collect();
    let dt = step.dt;

    let last = n.len() - 1;
    let slope_at = |i: usize| -> f64 {
        if i == 0 {
            (-3.0 * n[0] + 4.0 * n[1] - n[2]) / (2.0 * dt)
        } else if i == last {
            (3.0 * n[last] - 4.0 * n[last - 1] + n[last - 2]) / (2.0 * dt)
        } else {
            (n[i + 1] - n[i - 1]) / (2.0 * dt)
        }
    };
    let (i_max, s_max) = (0..n.len())
        .map(|i| (i, slope_at(i)))
        .fold((0, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best });
    if !(s_max > 0.0) {
        return Err(Error::DegenerateResponse("no rising segment"));
    }
    let intercept = t[i_max] - n[i_max] / s_max;
    let reaches_final = t[i_max] + (1.0 - n[i_max]) / s_max;
    Ok((intercept.max(0.0), reaches_final - intercept))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Result as R;
    use crate::ode::{integrate, OdeSystem};
    use approx::assert_abs_diff_eq;

    #[test]
    fn pid_row_reproduces_reported_gains() {
        let g = zn_gains(0.213, 1.79, ZnKind::PID).unwrap();
        assert_abs_diff_eq!(g.kp, 10.08, epsilon = 0.01);
        assert_abs_diff_eq!(g.kd, 1.07, epsilon = 0.01);
        assert_abs_diff_eq!(g.ki, 23.66, epsilon = 0.02);
        assert_eq!(g.ti, Some(0.426));
    }

    #[test]
    fn p_and_pi_rows() {
        let p = zn_gains(0.5, 2.0, ZnKind::P).unwrap();
        assert_eq!((p.kp, p.ti, p.td, p.ki, p.kd), (4.0, None, 0.0, 0.0, 0.0));
        let pi = zn_gains(0.3, 2.0, ZnKind::PI).unwrap();
        assert_abs_diff_eq!(pi.kp, 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pi.ti.unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(pi.kd, 0.0);
    }

    #[test]
    fn proportional_gain_depends_only_on_ratio() {
        let a = zn_gains(0.213, 1.79, ZnKind::PID).unwrap();
        let b = zn_gains(0.426, 3.58, ZnKind::PID).unwrap();
        assert_abs_diff_eq!(a.kp, b.kp, epsilon = 1e-12);
    }

    #[test]
    fn rejects_nonpositive_inputs() {
        assert!(zn_gains(0.0, 1.0, ZnKind::P).is_err());
        assert!(zn_gains(1.0, -1.0, ZnKind::PID).is_err());
    }

    struct FirstOrder;
    impl OdeSystem for FirstOrder {
        fn dimension(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, s: &[f64], out: &mut [f64]) -> R<()> {
            out[0] = (1.0 - s[0]) / 2.0;
            Ok(())
        }
        fn output_names(&self) -> Vec<String> {
            vec!["y".into()]
        }
    }

    /// 1 / ((s + 1)(2 s + 1)) as two cascaded lags.
    struct SecondOrder(f64);
    impl OdeSystem for SecondOrder {
        fn dimension(&self) -> usize {
            2
        }
        fn rhs(&self, _t: f64, s: &[f64], out: &mut [f64]) -> R<()> {
            out[0] = self.0 - s[0];
            out[1] = (s[0] - s[1]) / 2.0;
            Ok(())
        }
        fn output_names(&self) -> Vec<String> {
            vec!["w".into(), "y".into()]
        }
    }

    #[test]
    fn first_order_lag_has_no_dead_time() {
        let traj = integrate(&FirstOrder, &[0.0], 1e-3, 30.0).unwrap();
        let (l, t) = extract_lt(&traj, "y").unwrap();
        assert!(l.abs() < 1e-6);
        assert_abs_diff_eq!(t, 2.0, epsilon = 2e-3);
    }

    #[test]
    fn s_curve_has_dead_time() {
        let traj = integrate(&SecondOrder(1.0), &[0.0, 0.0], 1e-3, 40.0).unwrap();
        let (l, t) = extract_lt(&traj, "y").unwrap();
        assert!(l > 0.0);
        assert!(t > l);
    }

    #[test]
    fn amplitude_does_not_matter() {
        let a = integrate(&SecondOrder(1.0), &[0.0, 0.0], 1e-3, 40.0).unwrap();
        let b = integrate(&SecondOrder(3.5), &[0.0, 0.0], 1e-3, 40.0).unwrap();
        let (la, ta) = extract_lt(&a, "y").unwrap();
        let (lb, tb) = extract_lt(&b, "y").unwrap();
        assert_abs_diff_eq!(la, lb, epsilon = 1e-9);
        assert_abs_diff_eq!(ta, tb, epsilon = 1e-9);
    }

    #[test]
    fn flat_response_is_degenerate() {
        let traj = Trajectory::from_columns(0.1, vec![("y".into(), vec![1.0; 50])]).unwrap();
        assert!(matches!(
            extract_lt(&traj, "y"),
            Err(Error::DegenerateResponse(_))
        ));
    }
}
