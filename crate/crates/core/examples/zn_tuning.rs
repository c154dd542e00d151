//! Reaction-curve tuning: measure L and T on an S-shaped step, then tabulate gains.

use surgekit::control::{extract_lt, zn_gains, ZnKind};
use surgekit::ode::{integrate, OdeSystem};

/// 1 / ((s + 1)(2s + 1))
struct TwoLags;

impl OdeSystem for TwoLags {
    fn dimension(&self) -> usize {
        2
    }
    fn rhs(&self, _t: f64, s: &[f64], out: &mut [f64]) -> surgekit::Result<()> {
        out[0] = 1.0 - s[0];
        out[1] = (s[0] - s[1]) / 2.0;
        Ok(())
    }
    fn output_names(&self) -> Vec<String> {
        vec!["w".into(), "y".into()]
    }
}

fn main() -> surgekit::Result<()> {
    let step = integrate(&TwoLags, &[0.0, 0.0], 1e-3, 30.0)?;
    let (l, t) = extract_lt(&step, "y")?;
    println!("measured L = {l:.4}, T = {t:.4}");
    for kind in [ZnKind::P, ZnKind::PI, ZnKind::PID] {
        let g = zn_gains(l, t, kind)?;
        println!("{kind:?}: kp = {:.4}, ki = {:.4}, kd = {:.4}", g.kp, g.ki, g.kd);
    }

    let g = zn_gains(0.213, 1.79, ZnKind::PID)?;
    println!("\nL = 0.213, T = 1.79: kp = {:.4}, ki = {:.4}, kd = {:.4}", g.kp, g.ki, g.kd);
    Ok(())
}
