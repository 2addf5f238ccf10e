//! Median pilot contamination and BS throughput of all four allocation
//! schemes on identical drops.
//!
//! ```text
//! cargo run --release --example scheme_comparison -- [drops] [tau] [n_k]
//! ```

use srsim::{run_campaign, Scheme, SimConfig};

fn arg(i: usize, default: usize) -> usize {
    std::env::args().nth(i).and_then(|a| a.parse().ok()).unwrap_or(default)
}

fn main() -> srsim::Result<()> {
    let base = SimConfig {
        n_drops: arg(1, 20),
        tau: arg(2, 6),
        n_k: arg(3, 32),
        ..SimConfig::default()
    };
    println!("{:>8} {:>16} {:>14} {:>14} {:>8}", "scheme", "contam p50 dBm", "SINR p50 dB", "BS p50 Mbit/s", "secs");
    for scheme in Scheme::ALL {
        let config = SimConfig { scheme, ..base.clone() };
        let r = run_campaign(&config)?;
        println!(
            "{:>8} {:>16.2} {:>14.2} {:>14.2} {:>8.1}",
            scheme.as_str(),
            r.contamination_percentiles()?.p50,
            r.sinr_percentiles()?.p50,
            r.throughput_percentiles()?.p50,
            r.wall_clock_s
        );
    }
    Ok(())
}
