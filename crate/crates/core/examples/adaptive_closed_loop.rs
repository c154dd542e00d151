//! Adaptive anti-surge loop under three disturbance levels.

use surgekit::control::{simulate_closed_loop, ClosedLoopScenario};

fn main() -> surgekit::Result<()> {
    for target in [0.35, 0.45, 0.6] {
        let mut sc = ClosedLoopScenario::with_disturbance(target);
        sc.t_end = 60.0;
        let traj = simulate_closed_loop(&sc)?;
        let last = traj.last_row().expect("non-empty run");
        let idx = |n: &str| traj.column_index(n).expect("loop column");
        let drift = ["k1", "k2", "k3"]
            .iter()
            .zip([sc.controller.k1, sc.controller.k2, sc.controller.k3])
            .flat_map(|(n, k0)| traj.rows().map(move |r| (r[idx(n)] - k0).abs()).collect::<Vec<_>>())
            .fold(0.0, f64::max);
        println!(
            "d -> {target}: y(60) = {:.5}, co(60) = {:.5}, k = ({:.4}, {:.4}, {:.4}), max drift {drift:.4}",
            last[idx("y")],
            last[idx("co")],
            last[idx("k1")],
            last[idx("k2")],
            last[idx("k3")]
        );
    }
    Ok(())
}
