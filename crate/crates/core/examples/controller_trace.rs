//! Pilot power, decision variable and coverage radius per controller iteration.
//!
//! ```text
//! cargo run --release --example controller_trace -- [seed] [delta_p]
//! ```

use femtocoord::montecarlo::{trace_controller, trial_rng, SimConfig};

fn main() -> femtocoord::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let delta_p = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.25);
    let cfg = SimConfig { delta_p, ..SimConfig::default() };
    let t = trace_controller(&cfg, &mut trial_rng(seed, 0))?;
    println!("threshold {:.3} dB, wall at {:.1} m", t.threshold, t.wall);
    println!("{:>4} {:>10} {:>10} {:>8}", "i", "P_f", "Gamma", "r_f");
    for r in &t.rows {
        println!("{:>4} {:>10.3} {:>10.3} {:>8.2}", r.iteration, r.p_f, r.gamma, r.r_f);
    }
    println!("{}", if t.converged { "converged" } else { "did not converge" });
    Ok(())
}
