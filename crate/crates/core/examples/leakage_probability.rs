//! Closed-form leakage probability against direct sampling of the user model.

use femtocoord::analytics::{leakage_probability, leakage_probability_limit, leakage_probability_sampled, LeakageModelParams};
use femtocoord::montecarlo::trial_rng;

fn main() -> femtocoord::Result<()> {
    let base = LeakageModelParams {
        users: 5,
        exponent: 3.0,
        gamma_th: -2.6,
        gamma_delta: 0.0,
        gamma_delta_max: 1.71,
        r_b: 20.0,
        eps0: 1.0,
    };
    let mut rng = trial_rng(7, 0);
    println!("{:>6} {:>4} {:>10} {:>10}", "G_d", "K", "closed", "sampled");
    for k in [5, 10, 20, 40] {
        for g in [0.0, 1.5, 3.0, 4.5, 6.0] {
            let p = LeakageModelParams { users: k, gamma_delta: g, ..base };
            let closed = leakage_probability(&p)?;
            let sampled = leakage_probability_sampled(&p, 100_000, &mut rng)?;
            println!("{g:>6} {k:>4} {closed:>10.4} {sampled:>10.4}");
        }
    }
    for g in [0.0, 1.71, 3.0] {
        let p = LeakageModelParams { gamma_delta: g, ..base };
        println!("K -> inf, G_d = {g}: {}", leakage_probability_limit(&p)?);
    }
    Ok(())
}
