//! Parses a configuration text and sweeps the number of users.

use femtocoord::cli::parse_config;
use femtocoord::montecarlo::{run_experiment, SimConfig};

const CONFIG: &str = "
seed = 11
gamma_delta = 6
[building]
radius = 20
wall_loss = 3
";

fn main() -> femtocoord::Result<()> {
    let cfg = parse_config(CONFIG)?;
    println!("{:>4} {:>8} {:>8} {:>8}", "K", "H_K", "Omega", "iter");
    for users in [2, 5, 10, 20] {
        let c = SimConfig { users, ..cfg.clone() };
        let m = run_experiment(&c, 200)?;
        println!("{users:>4} {:>8.3} {:>8.3} {:>8.1}", m.hk, m.omega, m.mean_iterations);
    }
    Ok(())
}
