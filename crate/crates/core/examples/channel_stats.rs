//! Pathloss and Ricean channel statistics of single links.
//!
//! ```text
//! cargo run --release --example channel_stats
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use srsim::channel::{breakpoint_distance, los_probability, pathloss_uma, ricean_k, small_scale};
use srsim::units::db_to_linear;
use srsim::LinkState;

fn main() -> srsim::Result<()> {
    println!("breakpoint at 2 GHz: {:.2} m", breakpoint_distance(2.0));
    println!("{:>7} {:>8} {:>9} {:>9} {:>7}", "d [m]", "P(LOS)", "PL LOS", "PL NLOS", "K [dB]");
    for d in [35.0, 100.0, 200.0, 320.0, 500.0, 1000.0] {
        println!(
            "{d:>7.0} {:>8.3} {:>9.2} {:>9.2} {:>7.1}",
            los_probability(d),
            pathloss_uma(d, 2.0, true)?,
            pathloss_uma(d, 2.0, false)?,
            ricean_k(d)
        );
    }

    let n_a = 128;
    let draws = 20_000;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    println!("\nE[|h|^2] / (N_A g) over {draws} draws:");
    for k_db in [f64::NEG_INFINITY, 0.0, 10.0, f64::INFINITY] {
        let link = LinkState {
            distance: 100.0,
            los: k_db > f64::NEG_INFINITY,
            pathloss: 90.0,
            shadowing: 0.0,
            antenna_gain: 0.0,
            k_factor: db_to_linear(k_db),
            steering_angle: 20.0,
        };
        let mean = (0..draws)
            .map(|_| small_scale(&link, n_a, &mut rng).norm_sqr())
            .sum::<f64>()
            / draws as f64;
        println!("  K = {k_db:>5} dB: {:.4}", mean / (n_a as f64 * link.gain_linear()));
    }
    Ok(())
}
