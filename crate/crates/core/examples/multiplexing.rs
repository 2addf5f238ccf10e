//! Multiplexing more UEs with neighbour-aware fractional reuse at a fixed
//! training length of four symbols.
//!
//! ```text
//! cargo run --release --example multiplexing -- [drops]
//! ```

use srsim::{run_campaign, Scheme, SimConfig};

fn main() -> srsim::Result<()> {
    let drops = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(5);
    let base = SimConfig {
        tau: 4,
        n_drops: drops,
        ..SimConfig::default()
    };
    let points = [
        (Scheme::Reuse3, 20, 20),
        (Scheme::Reuse1, 32, 0),
        (Scheme::FrNa, 32, 16),
        (Scheme::FrNa, 40, 10),
        (Scheme::FrNa, 44, 10),
    ];
    println!("{:>7} {:>4} {:>10} {:>16} {:>14}", "scheme", "N_K", "protected", "contam p50 dBm", "BS p50 Mbit/s");
    for (scheme, n_k, protected) in points {
        let config = SimConfig {
            scheme,
            n_k,
            protected_ues_per_bs: protected,
            ..base.clone()
        };
        let r = run_campaign(&config)?;
        println!(
            "{:>7} {n_k:>4} {protected:>10} {:>16.2} {:>14.2}",
            scheme.as_str(),
            r.contamination_percentiles()?.p50,
            r.throughput_percentiles()?.p50
        );
    }
    Ok(())
}
