//! Eigenvalues along the equilibrium line and the surge boundary.

use surgekit::compressor::CompressorModel;
use surgekit::stability::{eigenvalues, stability_scan, surge_boundary};

fn main() -> surgekit::Result<()> {
    let model = CompressorModel::default();
    println!("surge boundary: phi* = {:.6}", surge_boundary(&model)?);

    for phi in [0.2, 0.4, 0.43, 0.44, 0.5, 0.7] {
        let [(re, im), _] = eigenvalues(&model, phi)?;
        println!("phi = {phi:.2}: lambda = {re:+.5} +/- {:.5}i", im.abs());
    }

    let rows = stability_scan(&model, 0.1, 0.79, 24)?;
    println!("\n{:>7} {:>10} {:>10}  class", "phi", "delta", "re");
    for r in rows {
        println!(
            "{:>7.4} {:>10.5} {:>10.5}  {}",
            r.phi,
            r.discriminant,
            r.real_part,
            r.classification.as_str()
        );
    }
    Ok(())
}
