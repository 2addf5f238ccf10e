//! Training overhead against pilot contamination for Reuse 1 with 16 UEs and
//! 64 antennas per BS.
//!
//! ```text
//! cargo run --release --example tau_sweep -- [drops]
//! ```

use srsim::{run_campaign, Scheme, SimConfig};

fn main() -> srsim::Result<()> {
    let drops = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10);
    let base = SimConfig {
        scheme: Scheme::Reuse1,
        n_antennas: 64,
        n_k: 16,
        n_drops: drops,
        ..SimConfig::default()
    };
    println!("{:>4} {:>16} {:>14}", "tau", "contam p50 dBm", "BS p50 Mbit/s");
    for tau in 1..=8 {
        let r = run_campaign(&SimConfig { tau, ..base.clone() })?;
        println!(
            "{tau:>4} {:>16.2} {:>14.2}",
            r.contamination_percentiles()?.p50,
            r.throughput_percentiles()?.p50
        );
    }
    let r3 = run_campaign(&SimConfig {
        scheme: Scheme::Reuse3,
        tau: 3,
        ..base
    })?;
    println!(
        "reuse3 tau=3: {:.2} dBm, {:.2} Mbit/s",
        r3.contamination_percentiles()?.p50,
        r3.throughput_percentiles()?.p50
    );
    Ok(())
}
