//! Builds the 57-sector wrap-around network, drops UEs and associates them.
//!
//! ```text
//! cargo run --release --example layout
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use srsim::channel::large_scale_links;
use srsim::geometry::{associate_ues, drop_ues};
use srsim::build_layout;

fn main() -> srsim::Result<()> {
    let layout = build_layout(500.0, 19)?;
    println!("{} sites, {} sectors, ISD {} m", layout.n_sites(), layout.n_bs(), layout.isd);
    for (i, w) in layout.wrap_vectors.iter().enumerate().skip(1) {
        println!("wrap image {i}: ({:8.1}, {:8.1}) m, |w| = {:.1} m", w.x, w.y, w.norm());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut ues = drop_ues(&layout, 57 * 32 * 4, &mut rng)?;
    let links = large_scale_links(&layout, &ues, 2.0, &mut rng)?;
    ues.association = associate_ues(&links.map(|l| l.gain_db()));

    let counts: Vec<usize> = ues.associated_per_bs(layout.n_bs()).iter().map(Vec::len).collect();
    let min = counts.iter().min().unwrap();
    let max = counts.iter().max().unwrap();
    println!("{} UEs dropped; associated per sector: min {min}, max {max}", ues.len());

    let serving_distance: Vec<f64> = ues
        .association
        .iter()
        .enumerate()
        .map(|(u, &b)| links[(b, u)].distance)
        .collect();
    let los = (0..ues.len()).filter(|&u| links[(ues.association[u], u)].los).count();
    println!(
        "mean serving distance {:.1} m, {:.1}% of serving links in LOS",
        serving_distance.iter().sum::<f64>() / ues.len() as f64,
        100.0 * los as f64 / ues.len() as f64
    );
    Ok(())
}
