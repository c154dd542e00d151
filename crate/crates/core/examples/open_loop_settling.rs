//! Stable operating point: the plant settles back after a large offset.

use surgekit::compressor::{throttle_from_flow, CompressorModel};
use surgekit::ode::{integrate, steady_state_of, vector_field_grid, GreitzerSystem};

fn main() -> surgekit::Result<()> {
    let model = CompressorModel::default();
    let g = throttle_from_flow(&model.map, 0.51)?;
    let sys = GreitzerSystem::new(model.map.clone(), model.params(g));
    let traj = integrate(&sys, &[0.63, 0.62], 0.01, 50.0)?;

    for t in [0.0, 2.0, 5.0, 10.0, 20.0, 50.0] {
        let r = traj.row((t / traj.dt).round() as usize);
        println!("t = {t:>4}: phi = {:.5}, psi = {:.5}", r[1], r[2]);
    }
    match steady_state_of(&traj, 500, 1e-3) {
        Some(ss) => println!("steady state ({:.4}, {:.4})", ss[0], ss[1]),
        None => println!("not settled"),
    }

    // Coarse look at the flow field around the equilibrium.
    for s in vector_field_grid(&model.map, g, (0.45, 0.6), (0.65, 0.75), 3)? {
        println!(
            "({:.3}, {:.3}) -> ({:+.4}, {:+.4})",
            s.state.phi, s.state.psi, s.derivative.phi, s.derivative.psi
        );
    }
    Ok(())
}
