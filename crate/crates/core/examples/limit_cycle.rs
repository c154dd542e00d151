//! Surge limit cycle at flow 0.4: detection, step-size check, phase plot.

use std::path::PathBuf;

use surgekit::compressor::{equilibrium_from_throttle, throttle_from_flow, CompressorModel};
use surgekit::ode::{integrate, GreitzerSystem};
use surgekit::output::{render_svg, PlotSpec, Series};
use surgekit::stability::detect_limit_cycle;

fn main() -> surgekit::Result<()> {
    let model = CompressorModel::default();
    let g = throttle_from_flow(&model.map, 0.4)?;
    let eq = equilibrium_from_throttle(&model.map, g)?;
    let sys = GreitzerSystem::new(model.map.clone(), model.params(g));
    let start = [eq.phi + 0.01, eq.psi + 0.01];

    let mut last = None;
    for dt in [0.01, 0.005] {
        let traj = integrate(&sys, &start, dt, 100.0)?;
        let rep = detect_limit_cycle(&traj, 0.5, 0.01)?;
        println!(
            "dt = {dt}: detected = {}, amplitude = {:.6}, period = {:.4}",
            rep.detected, rep.amplitude_phi, rep.period
        );
        last = Some(traj);
    }

    let traj = last.expect("ran at least once");
    let dir = std::env::var_os("SURGEKIT_OUT_DIR").map_or_else(|| PathBuf::from("out"), PathBuf::from);
    let path = dir.join("limit_cycle_phase.svg");
    let orbit = Series::new(
        "flow 0.4",
        traj.column("phi").unwrap_or_default(),
        traj.column("psi").unwrap_or_default(),
    );
    render_svg(&[orbit], &PlotSpec::phase("Surge limit cycle"), &path)?;
    println!("wrote {}", path.display());
    Ok(())
}
