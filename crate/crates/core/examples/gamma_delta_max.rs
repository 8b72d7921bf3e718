//! Largest safe threshold margin for the circular building at several wall losses.

use femtocoord::montecarlo::{reference_gamma_delta_max, SimConfig};

fn main() -> femtocoord::Result<()> {
    println!("{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}", "L_p", "mean", "min", "max", "I_max", "Z(r_b)");
    for wall_loss in [0.0, 3.0, 6.0, 10.0, 15.0] {
        let cfg = SimConfig { wall_loss, shadowing: false, ..SimConfig::default() };
        let r = reference_gamma_delta_max(&cfg, 72)?;
        println!(
            "{wall_loss:>6} {:>10.3} {:>10.3} {:>10.3} {:>10.2} {:>10.2}",
            r.mean, r.min, r.max, r.i_max_rb, r.z_rb
        );
    }
    Ok(())
}
