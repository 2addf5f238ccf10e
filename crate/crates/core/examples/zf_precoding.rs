//! Zero-forcing from clean and contaminated least-squares estimates in a
//! two-cell toy network.
//!
//! ```text
//! cargo run --release --example zf_precoding
//! ```

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use srsim::channel::ChannelSet;
use srsim::phy::{contamination_power, dl_sinr, ls_estimate, received_pilots, zf_precoder};
use srsim::srs_alloc::{collision_sets, Assigned, ResourceKind};
use srsim::units::linear_to_db;
use srsim::SrsAssignment;

fn gaussian(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im) * (scale / 2.0).sqrt()
        })
        .collect()
}

fn main() -> srsim::Result<()> {
    let (n_a, n_k) = (64, 4);
    let scheduled = vec![(0..n_k).collect::<Vec<_>>(), (n_k..2 * n_k).collect()];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // Own-cell links 20 dB stronger than cross-cell links.
    let channels = ChannelSet::from_fn(n_a, &scheduled, |bs, id| {
        let scale = if id.bs == bs { 1.0 } else { 0.01 };
        gaussian(n_a, scale, &mut rng)
    });

    for (label, shift) in [("orthogonal pilots", n_k), ("fully reused pilots", 0)] {
        let assignment = SrsAssignment {
            n_sequences: 2 * n_k,
            per_bs: (0..2)
                .map(|b| {
                    (0..n_k)
                        .map(|k| Assigned {
                            sequence: k + b * shift,
                            kind: ResourceKind::Shared,
                        })
                        .collect()
                })
                .collect(),
        };
        let pilots = received_pilots(&channels, &assignment, 1.0, 0.0, |b| ChaCha8Rng::seed_from_u64(b as u64))?;
        let precoders = (0..2)
            .map(|b| zf_precoder(&ls_estimate(&pilots[b], &assignment.sequences(b), 1.0), 1.0))
            .collect::<srsim::Result<Vec<_>>>()?;
        let sinr = dl_sinr(&channels, &precoders, 1e-3)?;
        let contamination = contamination_power(&channels, &assignment, &collision_sets(&assignment), 1.0);
        println!("{label}:");
        for k in 0..n_k {
            println!(
                "  UE {k}: contamination {:>8.2} dB, SINR {:>6.2} dB",
                linear_to_db(contamination[0][k]),
                linear_to_db(sinr[0][k])
            );
        }
    }
    Ok(())
}
