//! Averaged adaptation dynamics: eigenvalues at the nominal gains and on a grid.

use surgekit::averaging::{
    averaged_eigenvalues, parameter_grid, printed_eigenvalue, stability_verdict, AveragedPoint,
};
use surgekit::control::ActuatorMode;

fn main() -> surgekit::Result<()> {
    let p = AveragedPoint::new(10.0, 10.0, 0.7, 0.55, 1.0);
    let lam = averaged_eigenvalues(&p, ActuatorMode::Linear)?;
    println!("eigenvalues at (10, 10, 0.7): {:.3e}, {:.3e}, {:.6}", lam[0], lam[1], lam[2]);
    println!("closed form as printed:        {:.6}", printed_eigenvalue(&p)?);

    let fast = AveragedPoint { gamma: 2.0, ..p };
    println!("gamma = 2:                     {:.6}", averaged_eigenvalues(&fast, ActuatorMode::Linear)?[2]);

    let rows = stability_verdict(&parameter_grid(0.1, 50.0, 10, 0.7, 0.55, 1.0), ActuatorMode::Linear)?;
    let stable = rows.iter().filter(|r| r.stable).count();
    println!("stable at {stable} of {} grid points", rows.len());

    let sat = averaged_eigenvalues(&p, ActuatorMode::Saturated)?;
    println!("saturated valve: {sat:?}");
    Ok(())
}
