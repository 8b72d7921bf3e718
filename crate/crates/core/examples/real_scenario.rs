//! Leakage distance and indoor coverage for the rectangular building with
//! shadowing, two users and a mismatched threshold exponent.
//!
//! ```text
//! cargo run --release --example real_scenario -- [trials]
//! ```

use femtocoord::montecarlo::{aggregate, run_sweep, SimConfig, SweepPoint};

fn main() -> femtocoord::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(300);
    let cfg = SimConfig::real_scenario();
    let points: Vec<SweepPoint> = [2.0, 3.0, 4.0]
        .into_iter()
        .flat_map(|n_e| (0..=8).map(move |g| SweepPoint { users: 2, gamma_delta: g as f64, threshold_exponent: n_e }))
        .collect();
    let results = run_sweep(&cfg, &points, trials)?;
    println!("{:>4} {:>5} {:>10} {:>8} {:>6}", "n_e", "G_d", "Omega", "Psi", "H_K");
    for (p, o) in points.iter().zip(&results) {
        let m = aggregate(o)?;
        println!("{:>4} {:>5} {:>10.3} {:>8.4} {:>6.3}", p.threshold_exponent, p.gamma_delta, m.omega, m.psi, m.hk);
    }
    Ok(())
}
