//! Fixed PID against the adaptive law for the same disturbance.

use surgekit::control::{simulate_closed_loop, ClosedLoopScenario, ControllerConfig};

fn main() -> surgekit::Result<()> {
    let adaptive = ClosedLoopScenario::with_disturbance(0.35);
    let mut pid = adaptive.clone();
    pid.controller = ControllerConfig::fixed_pid(10.0, 24.0, 1.0);

    for (label, sc) in [("adaptive", &adaptive), ("fixed pid", &pid)] {
        let traj = simulate_closed_loop(sc)?;
        let y = traj.column("y").unwrap_or_default();
        let y_min = y.iter().cloned().fold(f64::INFINITY, f64::min);
        let y_end = *y.last().expect("non-empty run");
        println!(
            "{label:>9}: min y = {y_min:.5}, terminal |y - 0.55| = {:.3e}",
            (y_end - 0.55).abs()
        );
    }
    Ok(())
}
