//! One drop of the default scenario and the femtocell coverage boundary at a
//! few pilot powers.
//!
//! ```text
//! cargo run --release --example coverage_map -- [seed]
//! ```

use femtocoord::montecarlo::{generate_scenario, trial_rng, SimConfig};
use femtocoord::geometry::CoverageProfile;
use femtocoord::propagation::PowerDbm;

fn main() -> femtocoord::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let cfg = SimConfig::default();
    let s = generate_scenario(&cfg, &mut trial_rng(seed, 0))?;
    let t = s.env.layout.target_femto;
    println!("target femtocell at ({:.1}, {:.1}), {} macro sites, {} interferers", t.x, t.y, s.env.macro_count(), s.env.layout.interferer_femtos.len());
    println!("strongest neighbor at the site: {:.2} dBm", s.env.strongest_neighbor()?.dbm());
    println!("interference plus noise at the site: {:.2} dBm", s.env.site_interference_plus_noise()?.dbm());

    let profile = CoverageProfile::build(s.env.radio_map()?, &cfg.grid())?;
    println!("\n{:>8} {:>10} {:>10} {:>10} {:>8}", "P_f", "mean r_f", "excess", "max exc.", "indoor");
    for p in [-40.0, -30.0, -20.0, -10.0, 0.0, 10.0, 23.0] {
        let b = profile.boundary(PowerDbm::new(p)?);
        println!("{p:>8.1} {:>10.2} {:>10.2} {:>10.2} {:>8.3}", b.mean_radius(), b.mean_excess(), b.max_excess(), b.indoor_fraction());
    }
    Ok(())
}
