//! Ring-averaged interference versus the interference at the base station.

use femtocoord::interference::{interference_at_bs, ring_avg_interference, ub_table, InterfererSet};
use femtocoord::propagation::{PathLossModel, PowerDbm};

fn main() -> femtocoord::Result<()> {
    println!("{:>3} {:>6} {:>12} {:>12} {:>8}", "n", "D/d", "U", "B", "U/B");
    for e in ub_table() {
        println!("{:>3} {:>6} {:>12.6} {:>12.6} {:>8.4}", e.exponent, e.ratio, e.u, e.b, e.ratio_u_over_b());
    }

    // six co-distance femtocells at 60 m behind 10 dB walls
    let model = PathLossModel::deterministic(3.0, 37.0)?;
    let set = InterfererSet::homogeneous(6, 60.0, PowerDbm::new(10.0)?, 10.0, model)?;
    let at_bs = interference_at_bs(&set);
    println!("\nring radius   I_ring/I_bs");
    for d in [5.0, 10.0, 20.0, 30.0, 40.0, 50.0] {
        println!("{d:>11} {:>13.4}", ring_avg_interference(d, &set)? / at_bs);
    }
    Ok(())
}
