//! SRS budgets and the collision structure of the four allocation schemes on
//! one network drop.
//!
//! ```text
//! cargo run --release --example srs_allocation
//! ```

use srsim::engine::SimConfig;
use srsim::srs_alloc::{max_scheduled, pool_capacity};
use srsim::Scheme;

fn main() -> srsim::Result<()> {
    println!("{:>4} {:>4} {:>10} {:>10} {:>10}", "tau", "N_P", "reuse1", "half", "reuse3");
    for tau in [1, 2, 3, 4, 6, 14] {
        let n = pool_capacity(tau)?;
        println!(
            "{tau:>4} {n:>4} {:>10} {:>10} {:>10}",
            max_scheduled(n, 0.0),
            max_scheduled(n, 0.5),
            max_scheduled(n, 1.0)
        );
    }

    println!();
    for scheme in Scheme::ALL {
        let config = SimConfig {
            scheme,
            n_drops: 1,
            ..SimConfig::default()
        };
        let pool = config.pool()?;
        let m = srsim::run_drop(&config, 0)?;
        let protected = m.ues.iter().filter(|u| u.kind == srsim::srs_alloc::ResourceKind::Protected).count();
        let clean = m.ues.iter().filter(|u| u.contamination_w == 0.0).count();
        println!(
            "{:>7}: {} protected + {} shared sequences; {protected} of {} UEs protected, {clean} collision-free",
            scheme.as_str(),
            pool.protected_count,
            pool.shared_count,
            m.ues.len()
        );
    }

    let bad = SimConfig {
        scheme: Scheme::FrNa,
        tau: 4,
        n_k: 45,
        protected_ues_per_bs: 10,
        ..SimConfig::default()
    };
    println!("\n{}", bad.validate().unwrap_err());
    Ok(())
}
