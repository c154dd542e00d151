//! Scenario text in, files and a summary out.

use surgekit::cli::execute;
use surgekit::scenario::parse_scenario;

const TEXT: &str = "
name = gamma2
kind = closedloop

[controller]
kind = adaptive
gamma = 2

[disturbance]
target = 0.4

[sim]
t_end = 30
decimate = 100
";

fn main() -> surgekit::Result<()> {
    let sc = parse_scenario(TEXT)?;
    let dir = std::env::temp_dir().join("surgekit-example");
    execute(&sc, &dir, &mut std::io::stdout())?;

    if let Err(e) = parse_scenario("[controller]\ngamma = -1\n") {
        println!("rejected: {e}");
    }
    Ok(())
}
