//! Compressor characteristic and the equilibria a throttle setting produces.

use surgekit::compressor::{equilibrium_from_throttle, throttle_from_flow, CompressorMap};

fn main() -> surgekit::Result<()> {
    let map = CompressorMap::default();
    println!("{:>6} {:>9} {:>9}", "phi", "psi_c", "slope");
    for i in 1..=15 {
        let phi = 0.05 * i as f64;
        println!(
            "{phi:>6.2} {:>9.5} {:>9.5}",
            map.pressure_rise(phi)?,
            map.slope_at(phi)?
        );
    }

    println!();
    for phi in [0.3, 0.4, 0.51, 0.6] {
        let g = throttle_from_flow(&map, phi)?;
        let eq = equilibrium_from_throttle(&map, g)?;
        println!("flow {phi:.2}: g = {g:.6}, equilibrium ({:.6}, {:.6})", eq.phi, eq.psi);
    }
    Ok(())
}
