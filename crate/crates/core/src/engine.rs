//! Seeded Monte Carlo campaigns.
//!
//! A drop is one independent network snapshot: UE positions, large-scale
//! state, scheduling, SRS allocation, block-fading channels and the resulting
//! per-UE and per-BS metrics. Every stage draws from its own counter-based
//! substream (see [`crate::rng`]), so schemes evaluated with the same seed see
//! the same UEs and channels and differ only in their allocation.

use std::time::Instant;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{assemble_channels, large_scale_links};
use crate::error::{Error, Result};
use crate::geometry::{associate_ues, build_layout, drop_ues, NetworkLayout, DEFAULT_SITES, SECTORS_PER_SITE};
use crate::phy::{
    bs_throughput, contamination_power, dl_sinr, ls_estimate, received_pilots, zf_precoder, Precoder,
};
use crate::rng::{DropSeed, Stage};
use crate::srs_alloc::{
    allocate_fractional, allocate_reuse1, allocate_reuse3, collision_sets, pool_capacity,
    rank_cell_centric, rank_neighbour_aware, ResourceKind, Scheme, SrsPool, SUBFRAME_SYMBOLS,
};
use crate::units::{dbm_to_watts, linear_to_db, noise_power_watts, watts_to_dbm};

/// Stand-in for zero pilot interference in dBm outputs.
pub const CONTAMINATION_FLOOR_DBM: f64 = -250.0;

/// Attempts per drop before a campaign gives up on a configuration.
pub const MAX_ATTEMPTS_PER_DROP: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub scheme: Scheme,
    pub seed: u64,
    pub n_drops: usize,
    pub n_antennas: usize,
    /// UEs scheduled per BS.
    pub n_k: usize,
    /// Training OFDM symbols per subframe.
    pub tau: usize,
    /// UEs per BS on protected sequences; fractional schemes only.
    pub protected_ues_per_bs: usize,
    /// UEs dropped per BS and scheduled UE: `N_U = N_B · n_k · factor`.
    pub ue_density_factor: usize,
    pub n_sites: usize,
    pub isd_m: f64,
    pub carrier_ghz: f64,
    pub bandwidth_hz: f64,
    pub bs_tx_power_dbm: f64,
    pub ue_tx_power_dbm: f64,
    pub ue_noise_figure_db: f64,
    pub bs_noise_figure_db: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::FrNa,
            seed: 1,
            n_drops: 200,
            n_antennas: 128,
            n_k: 32,
            tau: 6,
            protected_ues_per_bs: 16,
            ue_density_factor: 4,
            n_sites: DEFAULT_SITES,
            isd_m: 500.0,
            carrier_ghz: 2.0,
            bandwidth_hz: 20e6,
            bs_tx_power_dbm: 49.0,
            ue_tx_power_dbm: 23.0,
            ue_noise_figure_db: 9.0,
            bs_noise_figure_db: 5.0,
        }
    }
}

impl SimConfig {
    pub fn n_bs(&self) -> usize {
        self.n_sites * SECTORS_PER_SITE
    }

    pub fn n_ues(&self) -> usize {
        self.n_bs() * self.n_k * self.ue_density_factor
    }

    /// Pilot transmit power ρ, watts.
    pub fn rho(&self) -> f64 {
        dbm_to_watts(self.ue_tx_power_dbm)
    }

    pub fn bs_power(&self) -> f64 {
        dbm_to_watts(self.bs_tx_power_dbm)
    }

    pub fn noise_ul(&self) -> f64 {
        noise_power_watts(self.bandwidth_hz, self.bs_noise_figure_db)
    }

    pub fn noise_dl(&self) -> f64 {
        noise_power_watts(self.bandwidth_hz, self.ue_noise_figure_db)
    }

    /// Protected UEs per BS as actually used by the scheme.
    pub fn effective_protected(&self) -> usize {
        match self.scheme {
            Scheme::Reuse1 => 0,
            Scheme::Reuse3 => self.n_k,
            Scheme::FrCc | Scheme::FrNa => self.protected_ues_per_bs,
        }
    }

    pub fn pool(&self) -> Result<SrsPool> {
        match self.scheme {
            Scheme::Reuse1 => SrsPool::reuse1(self.tau),
            Scheme::Reuse3 => SrsPool::reuse3(self.tau),
            Scheme::FrCc | Scheme::FrNa => SrsPool::with_partition(self.tau, self.protected_ues_per_bs),
        }
    }

    /// Checks every invariant, including the sequence budget, before any run.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n_sites != DEFAULT_SITES {
            return Err(Error::Layout(format!(
                "only the {DEFAULT_SITES}-site wrap-around cluster is supported, got {} sites",
                self.n_sites
            )));
        }
        if self.n_drops == 0 {
            return bad("n_drops must be at least 1".into());
        }
        if self.n_k == 0 {
            return bad("n_k must be at least 1".into());
        }
        if self.n_antennas == 0 {
            return bad("n_antennas must be at least 1".into());
        }
        if self.ue_density_factor == 0 {
            return bad("ue_density_factor must be at least 1".into());
        }
        for (name, v) in [
            ("isd_m", self.isd_m),
            ("carrier_ghz", self.carrier_ghz),
            ("bandwidth_hz", self.bandwidth_hz),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        for (name, v) in [
            ("bs_tx_power_dbm", self.bs_tx_power_dbm),
            ("ue_tx_power_dbm", self.ue_tx_power_dbm),
            ("ue_noise_figure_db", self.ue_noise_figure_db),
            ("bs_noise_figure_db", self.bs_noise_figure_db),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite"));
            }
        }
        let n_p = pool_capacity(self.tau)?;
        if self.n_k > self.n_antennas {
            return bad(format!(
                "zero forcing needs n_k ≤ n_antennas, got n_k={} with {} antennas",
                self.n_k, self.n_antennas
            ));
        }
        match self.scheme {
            Scheme::Reuse1 if self.n_k > n_p => Err(Error::Budget(format!(
                "N_K={} needs ≥ {} sequences, have {n_p} (reuse1, tau={})",
                self.n_k, self.n_k, self.tau
            ))),
            Scheme::Reuse3 if self.n_k > n_p / 3 => Err(Error::Budget(format!(
                "N_K={} needs ≥ 3·{} = {} sequences, have {n_p}: {} > floor({n_p}/3) (reuse3, tau={})",
                self.n_k,
                self.n_k,
                3 * self.n_k,
                self.n_k,
                self.tau
            ))),
            Scheme::FrCc | Scheme::FrNa => {
                let p = self.protected_ues_per_bs;
                if p > self.n_k {
                    return bad(format!(
                        "protected_ues_per_bs={p} exceeds n_k={}",
                        self.n_k
                    ));
                }
                let need = 3 * p + (self.n_k - p);
                if need > n_p {
                    return Err(Error::Budget(format!(
                        "N_K={} needs ≥ 3·{p}+{} = {need} sequences, have {n_p} ({}, tau={})",
                        self.n_k,
                        self.n_k - p,
                        self.scheme,
                        self.tau
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Uniform random subset of `n_k` associated UEs per BS, in ascending UE order.
pub fn schedule<R: Rng + ?Sized>(associated: &[Vec<usize>], n_k: usize, rng: &mut R) -> Result<Vec<Vec<usize>>> {
    associated
        .iter()
        .enumerate()
        .map(|(bs, list)| {
            if list.len() < n_k {
                return Err(Error::NotEnoughUes {
                    bs,
                    associated: list.len(),
                    required: n_k,
                });
            }
            let mut picked: Vec<usize> = sample(rng, list.len(), n_k).into_iter().map(|i| list[i]).collect();
            picked.sort_unstable();
            Ok(picked)
        })
        .collect()
}

/// Metrics of one scheduled UE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UeSample {
    pub bs: usize,
    pub ue: usize,
    pub kind: ResourceKind,
    /// Pilot contamination power, watts.
    pub contamination_w: f64,
    /// Downlink SINR, linear.
    pub sinr: f64,
}

impl UeSample {
    pub fn contamination_dbm(&self) -> f64 {
        contamination_to_dbm(self.contamination_w)
    }

    pub fn sinr_db(&self) -> f64 {
        linear_to_db(self.sinr)
    }
}

pub fn contamination_to_dbm(w: f64) -> f64 {
    if w > 0.0 {
        watts_to_dbm(w).max(CONTAMINATION_FLOOR_DBM)
    } else {
        CONTAMINATION_FLOOR_DBM
    }
}

/// Outcome of one subframe in one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct DropMetrics {
    pub drop: usize,
    pub tau: usize,
    /// Scheduled UEs in BS-major order.
    pub ues: Vec<UeSample>,
    /// Sum throughput per BS, bit/s.
    pub bs_throughput: Vec<f64>,
    /// Realizations discarded before this one succeeded.
    pub invalid_attempts: usize,
}

/// One drop realization at a given attempt, without resampling.
pub fn simulate_drop(config: &SimConfig, layout: &NetworkLayout, seed: DropSeed) -> Result<DropMetrics> {
    let n_bs = layout.n_bs();
    let mut ues = drop_ues(layout, config.n_ues(), &mut seed.stage(Stage::Positions))?;
    let links = large_scale_links(layout, &ues, config.carrier_ghz, &mut seed.stage(Stage::LargeScale))?;
    let gains = links.map(|l| l.gain_db());
    ues.association = associate_ues(&gains);
    let scheduled = schedule(
        &ues.associated_per_bs(n_bs),
        config.n_k,
        &mut seed.stage(Stage::Schedule),
    )?;

    // Large-scale received powers as carried by measurement reports.
    let pool = config.pool()?;
    let mut alloc_rng = seed.stage(Stage::Allocation);
    let assignment = match config.scheme {
        Scheme::Reuse1 => allocate_reuse1(&pool, &scheduled, &mut alloc_rng)?,
        Scheme::Reuse3 => allocate_reuse3(&pool, &scheduled, &mut alloc_rng)?,
        Scheme::FrCc | Scheme::FrNa => {
            let tx = config.ue_tx_power_dbm;
            let rankings: Vec<Vec<usize>> = scheduled
                .iter()
                .enumerate()
                .map(|(b, list)| {
                    if config.scheme == Scheme::FrCc {
                        let p: Vec<(usize, f64)> = list.iter().map(|&u| (u, tx + gains[(b, u)])).collect();
                        rank_cell_centric(&p)
                    } else {
                        let p: Vec<(usize, f64)> = list
                            .iter()
                            .map(|&u| {
                                let strongest = (0..n_bs)
                                    .filter(|&j| j != b)
                                    .map(|j| gains[(j, u)])
                                    .fold(f64::NEG_INFINITY, f64::max);
                                (u, tx + strongest)
                            })
                            .collect();
                        rank_neighbour_aware(&p)
                    }
                })
                .collect();
            allocate_fractional(&pool, &scheduled, &rankings, &mut alloc_rng)?
        }
    };

    let channels = assemble_channels(&links, &scheduled, config.n_antennas, |bs| {
        seed.substream(Stage::SmallScale, bs as u64)
    });
    drop(links);

    let rho = config.rho();
    let pilots = received_pilots(&channels, &assignment, rho, config.noise_ul(), |bs| {
        seed.substream(Stage::PilotNoise, bs as u64)
    })?;
    let precoders: Vec<Precoder> = pilots
        .par_iter()
        .enumerate()
        .map(|(b, y)| zf_precoder(&ls_estimate(y, &assignment.sequences(b), rho), config.bs_power()))
        .collect::<Result<_>>()?;
    drop(pilots);

    let sinr = dl_sinr(&channels, &precoders, config.noise_dl())?;
    let contamination = contamination_power(&channels, &assignment, &collision_sets(&assignment), rho);

    let bs_tp = sinr
        .iter()
        .map(|g| bs_throughput(g, config.tau, SUBFRAME_SYMBOLS, config.bandwidth_hz))
        .collect();
    let mut samples = Vec::with_capacity(n_bs * config.n_k);
    for (bs, list) in scheduled.iter().enumerate() {
        for (slot, &ue) in list.iter().enumerate() {
            samples.push(UeSample {
                bs,
                ue,
                kind: assignment.per_bs[bs][slot].kind,
                contamination_w: contamination[bs][slot],
                sinr: sinr[bs][slot],
            });
        }
    }
    Ok(DropMetrics {
        drop: seed.drop as usize,
        tau: config.tau,
        ues: samples,
        bs_throughput: bs_tp,
        invalid_attempts: 0,
    })
}

fn run_drop_on(config: &SimConfig, layout: &NetworkLayout, drop_index: usize) -> Result<DropMetrics> {
    let mut last = String::new();
    for attempt in 0..MAX_ATTEMPTS_PER_DROP {
        match simulate_drop(config, layout, DropSeed::new(config.seed, drop_index, attempt)) {
            Ok(mut m) => {
                m.invalid_attempts = attempt;
                return Ok(m);
            }
            Err(e) if e.is_resampleable() => last = e.to_string(),
            Err(e) => return Err(e),
        }
    }
    Err(Error::ResampleLimit {
        drop: drop_index,
        attempts: MAX_ATTEMPTS_PER_DROP,
        last,
    })
}

/// Runs drop `drop_index`, resampling invalid realizations.
pub fn run_drop(config: &SimConfig, drop_index: usize) -> Result<DropMetrics> {
    config.validate()?;
    let layout = build_layout(config.isd_m, config.n_sites)?;
    run_drop_on(config, &layout, drop_index)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Percentiles {
    pub count: usize,
    pub p5: f64,
    pub p50: f64,
    pub p95: f64,
}

impl Percentiles {
    pub fn of(samples: &[f64]) -> Result<Self> {
        Ok(Self {
            count: samples.len(),
            p5: percentile(samples, 0.05)?,
            p50: percentile(samples, 0.50)?,
            p95: percentile(samples, 0.95)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub config: SimConfig,
    pub drops: Vec<DropMetrics>,
    pub invalid_drops: usize,
    pub wall_clock_s: f64,
}

impl CampaignResult {
    pub fn ue_samples(&self) -> impl Iterator<Item = (usize, &UeSample)> {
        self.drops.iter().flat_map(|d| d.ues.iter().map(move |u| (d.drop, u)))
    }

    pub fn contamination_dbm(&self) -> Vec<f64> {
        self.ue_samples().map(|(_, u)| u.contamination_dbm()).collect()
    }

    pub fn sinr_db(&self) -> Vec<f64> {
        self.ue_samples().map(|(_, u)| u.sinr_db()).collect()
    }

    /// One sample per (drop, BS), Mbit/s.
    pub fn bs_throughput_mbps(&self) -> Vec<f64> {
        self.drops
            .iter()
            .flat_map(|d| d.bs_throughput.iter().map(|t| t / 1e6))
            .collect()
    }

    pub fn contamination_percentiles(&self) -> Result<Percentiles> {
        Percentiles::of(&self.contamination_dbm())
    }

    pub fn throughput_percentiles(&self) -> Result<Percentiles> {
        Percentiles::of(&self.bs_throughput_mbps())
    }

    pub fn sinr_percentiles(&self) -> Result<Percentiles> {
        Percentiles::of(&self.sinr_db())
    }
}

/// Runs `config.n_drops` drops on the current rayon pool. The result depends
/// only on the configuration, never on the thread count.
pub fn run_campaign(config: &SimConfig) -> Result<CampaignResult> {
    config.validate()?;
    let start = Instant::now();
    let layout = build_layout(config.isd_m, config.n_sites)?;
    let drops: Vec<DropMetrics> = (0..config.n_drops)
        .into_par_iter()
        .map(|d| run_drop_on(config, &layout, d))
        .collect::<Result<_>>()?;
    let invalid_drops = drops.iter().map(|d| d.invalid_attempts).sum();
    Ok(CampaignResult {
        config: config.clone(),
        drops,
        invalid_drops,
        wall_clock_s: start.elapsed().as_secs_f64(),
    })
}

/// Empirical quantile with linear interpolation between order statistics
/// (position `q · (n − 1)` in the sorted sample).
pub fn percentile(samples: &[f64], q: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!("quantile {q} outside [0, 1]")));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let h = q * (v.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Ok(v[lo] + (h - lo as f64) * (v[hi] - v[lo]))
}

/// Empirical CDF as sorted `(value, P[X ≤ value])` pairs.
pub fn ecdf(samples: &[f64]) -> Vec<(f64, f64)> {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.into_iter()
        .enumerate()
        .map(|(i, x)| (x, (i + 1) as f64 / n))
        .collect()
}
