//! Large-scale propagation (3GPP UMa) and Ricean small-scale fading over a
//! half-wavelength uniform linear array.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{sector_antenna_gain, NetworkLayout, UeDrop, BS_HEIGHT_M, UE_HEIGHT_M};
use crate::grid::LinkGrid;
use crate::units::{db_to_linear, SPEED_OF_LIGHT};

pub const SHADOWING_STD_LOS_DB: f64 = 4.0;
pub const SHADOWING_STD_NLOS_DB: f64 = 6.0;

/// UMa street width and average building height used by the NLOS formula.
const STREET_WIDTH_M: f64 = 20.0;
const BUILDING_HEIGHT_M: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    /// 2-D distance on the nearest wrap image, metres.
    pub distance: f64,
    pub los: bool,
    pub pathloss: f64,
    pub shadowing: f64,
    pub antenna_gain: f64,
    /// Linear Ricean K; zero for NLOS links.
    pub k_factor: f64,
    /// UE azimuth seen from the BS boresight, degrees.
    pub steering_angle: f64,
}

impl LinkState {
    /// Large-scale gain in dB: −pathloss − shadowing + antenna gain.
    pub fn gain_db(&self) -> f64 {
        -self.pathloss - self.shadowing + self.antenna_gain
    }

    pub fn gain_linear(&self) -> f64 {
        db_to_linear(self.gain_db())
    }
}

/// UMa line-of-sight probability.
pub fn los_probability(d: f64) -> f64 {
    let e = (-d / 63.0).exp();
    (18.0 / d).min(1.0) * (1.0 - e) + e
}

/// Breakpoint distance for effective antenna heights `h_bs − 1`, `h_ut − 1`.
pub fn breakpoint_distance(fc_ghz: f64) -> f64 {
    4.0 * (BS_HEIGHT_M - 1.0) * (UE_HEIGHT_M - 1.0) * fc_ghz * 1e9 / SPEED_OF_LIGHT
}

/// 3GPP UMa pathloss in dB for `h_BS` = 25 m and `h_UT` = 1.5 m.
pub fn pathloss_uma(d: f64, fc_ghz: f64, los: bool) -> Result<f64> {
    if !(10.0..=5000.0).contains(&d) {
        return Err(Error::DistanceOutOfRange(d));
    }
    let lg = f64::log10;
    let pl_los = if d < breakpoint_distance(fc_ghz) {
        22.0 * lg(d) + 28.0 + 20.0 * lg(fc_ghz)
    } else {
        40.0 * lg(d) + 7.8 - 18.0 * lg(BS_HEIGHT_M - 1.0) - 18.0 * lg(UE_HEIGHT_M - 1.0)
            + 2.0 * lg(fc_ghz)
    };
    if los {
        return Ok(pl_los);
    }
    let (w, h, h_bs, h_ut) = (STREET_WIDTH_M, BUILDING_HEIGHT_M, BS_HEIGHT_M, UE_HEIGHT_M);
    let pl_nlos = 161.04 - 7.1 * lg(w) + 7.5 * lg(h)
        - (24.37 - 3.7 * (h / h_bs).powi(2)) * lg(h_bs)
        + (43.42 - 3.1 * lg(h_bs)) * (lg(d) - 3.0)
        + 20.0 * lg(fc_ghz)
        - (3.2 * lg(11.75 * h_ut).powi(2) - 4.97);
    Ok(pl_nlos.max(pl_los))
}

/// Zero-mean log-normal shadowing sample in dB.
pub fn sample_shadowing<R: Rng + ?Sized>(los: bool, rng: &mut R) -> f64 {
    let std = if los {
        SHADOWING_STD_LOS_DB
    } else {
        SHADOWING_STD_NLOS_DB
    };
    Normal::new(0.0, std).expect("finite std").sample(rng)
}

/// Distance-dependent Ricean K factor of a LOS link, in dB.
pub fn ricean_k(d: f64) -> f64 {
    13.0 - 0.03 * d
}

/// Samples the frozen large-scale state of every (BS, UE) link in a drop.
pub fn large_scale_links<R: Rng + ?Sized>(
    layout: &NetworkLayout,
    drop: &UeDrop,
    fc_ghz: f64,
    rng: &mut R,
) -> Result<LinkGrid<LinkState>> {
    let mut rows = Vec::with_capacity(layout.n_bs());
    for bs in 0..layout.n_bs() {
        let mut row = Vec::with_capacity(drop.len());
        for &p in &drop.positions {
            let geo = layout.link_geometry(bs, p, drop.height);
            let los = rng.random::<f64>() < los_probability(geo.distance_2d);
            let pathloss = pathloss_uma(geo.distance_2d, fc_ghz, los)?;
            let shadowing = sample_shadowing(los, rng);
            row.push(LinkState {
                distance: geo.distance_2d,
                los,
                pathloss,
                shadowing,
                antenna_gain: sector_antenna_gain(geo.horizontal_deg, geo.vertical_deg),
                k_factor: if los {
                    db_to_linear(ricean_k(geo.distance_2d))
                } else {
                    0.0
                },
                steering_angle: geo.horizontal_deg,
            });
        }
        rows.push(row);
    }
    Ok(LinkGrid::from_rows(rows))
}

/// Length-`N_A` channel of one link, large-scale gain included.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector(pub Vec<Complex64>);

impl ChannelVector {
    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.0)
    }
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// Half-wavelength ULA response towards azimuth `theta_deg` (broadside = 0°).
pub fn steering_vector(theta_deg: f64, n_antennas: usize) -> Vec<Complex64> {
    let phase = PI * theta_deg.to_radians().sin();
    (0..n_antennas)
        .map(|n| Complex64::from_polar(1.0, phase * n as f64))
        .collect()
}

/// Writes one Ricean realization of `link` into `out`.
pub fn fill_small_scale<R: Rng + ?Sized>(link: &LinkState, out: &mut [Complex64], rng: &mut R) {
    let g = link.gain_linear().sqrt();
    let k = link.k_factor;
    let (los_amp, nlos_amp) = if k.is_infinite() {
        (g, 0.0)
    } else {
        (g * (k / (k + 1.0)).sqrt(), g * (1.0 / (k + 1.0)).sqrt())
    };
    let nlos_amp = nlos_amp * std::f64::consts::FRAC_1_SQRT_2;
    if los_amp > 0.0 {
        let psi = rng.random::<f64>() * 2.0 * PI;
        let step = PI * link.steering_angle.to_radians().sin();
        for (n, h) in out.iter_mut().enumerate() {
            *h = Complex64::from_polar(los_amp, psi + step * n as f64);
        }
    } else {
        out.fill(Complex64::new(0.0, 0.0));
    }
    if nlos_amp > 0.0 {
        for h in out.iter_mut() {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            *h += Complex64::new(re * nlos_amp, im * nlos_amp);
        }
    }
}

pub fn small_scale<R: Rng + ?Sized>(link: &LinkState, n_antennas: usize, rng: &mut R) -> ChannelVector {
    let mut v = vec![Complex64::new(0.0, 0.0); n_antennas];
    fill_small_scale(link, &mut v, rng);
    ChannelVector(v)
}

/// Identifies the `slot`-th UE scheduled by `bs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StreamId {
    pub bs: usize,
    pub slot: usize,
}

/// Channels from every BS to every scheduled UE in the network.
///
/// Streams are numbered globally in BS-major order; `channel(bs, s)` is the
/// channel between BS `bs` and global stream `s`. The same realization serves
/// uplink estimation and downlink precoding.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    n_antennas: usize,
    n_bs: usize,
    offsets: Vec<usize>,
    streams: Vec<StreamId>,
    ues: Vec<usize>,
    data: Vec<Complex64>,
}

impl ChannelSet {
    /// Builds a set from an explicit generator, mainly for tests and examples.
    pub fn from_fn(
        n_antennas: usize,
        scheduled: &[Vec<usize>],
        mut f: impl FnMut(usize, StreamId) -> Vec<Complex64>,
    ) -> Self {
        let mut set = Self::empty(n_antennas, scheduled);
        let stride = set.n_streams() * n_antennas;
        for bs in 0..set.n_bs {
            for s in 0..set.n_streams() {
                let v = f(bs, set.streams[s]);
                assert_eq!(v.len(), n_antennas, "channel length");
                let start = bs * stride + s * n_antennas;
                set.data[start..start + n_antennas].copy_from_slice(&v);
            }
        }
        set
    }

    fn empty(n_antennas: usize, scheduled: &[Vec<usize>]) -> Self {
        let mut offsets = Vec::with_capacity(scheduled.len() + 1);
        let mut streams = Vec::new();
        let mut ues = Vec::new();
        for (bs, list) in scheduled.iter().enumerate() {
            offsets.push(streams.len());
            for (slot, &ue) in list.iter().enumerate() {
                streams.push(StreamId { bs, slot });
                ues.push(ue);
            }
        }
        offsets.push(streams.len());
        let n_bs = scheduled.len();
        let len = n_bs * streams.len() * n_antennas;
        Self {
            n_antennas,
            n_bs,
            offsets,
            streams,
            ues,
            data: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    pub fn n_bs(&self) -> usize {
        self.n_bs
    }

    pub fn n_streams(&self) -> usize {
        self.streams.len()
    }

    pub fn streams(&self) -> &[StreamId] {
        &self.streams
    }

    pub fn n_scheduled(&self, bs: usize) -> usize {
        self.offsets[bs + 1] - self.offsets[bs]
    }

    pub fn stream_index(&self, id: StreamId) -> usize {
        debug_assert!(id.slot < self.n_scheduled(id.bs));
        self.offsets[id.bs] + id.slot
    }

    /// UE index of a global stream.
    pub fn ue(&self, stream: usize) -> usize {
        self.ues[stream]
    }

    pub fn channel(&self, bs: usize, stream: usize) -> &[Complex64] {
        let start = (bs * self.n_streams() + stream) * self.n_antennas;
        &self.data[start..start + self.n_antennas]
    }

    /// Channels from `bs` to all streams, stream-major.
    pub fn bs_block(&self, bs: usize) -> &[Complex64] {
        let stride = self.n_streams() * self.n_antennas;
        &self.data[bs * stride..(bs + 1) * stride]
    }
}

/// Generates channels for every (BS, scheduled UE) pair. Each BS draws from
/// its own RNG so the rows can be filled concurrently.
pub fn assemble_channels<R, F>(
    links: &LinkGrid<LinkState>,
    scheduled: &[Vec<usize>],
    n_antennas: usize,
    rng_for_bs: F,
) -> ChannelSet
where
    R: Rng,
    F: Fn(usize) -> R + Sync,
{
    assert_eq!(links.n_bs(), scheduled.len(), "one scheduled list per BS");
    let mut set = ChannelSet::empty(n_antennas, scheduled);
    let stride = set.n_streams() * n_antennas;
    if stride == 0 {
        return set;
    }
    let ues = set.ues.clone();
    set.data
        .par_chunks_mut(stride)
        .enumerate()
        .for_each(|(bs, block)| {
            let mut rng = rng_for_bs(bs);
            for (s, out) in block.chunks_mut(n_antennas).enumerate() {
                fill_small_scale(&links[(bs, ues[s])], out, &mut rng);
            }
        });
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_layout, drop_ues};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn link(k_factor: f64, gain_db: f64, angle: f64) -> LinkState {
        LinkState {
            distance: 100.0,
            los: k_factor > 0.0,
            pathloss: -gain_db,
            shadowing: 0.0,
            antenna_gain: 0.0,
            k_factor,
            steering_angle: angle,
        }
    }

    #[test]
    fn los_probability_values() {
        assert!((los_probability(1e-6) - 1.0).abs() < 1e-9);
        assert!((los_probability(18.0) - 1.0).abs() < 1e-12);
        let p500 = 18.0 / 500.0 * (1.0 - (-500.0f64 / 63.0).exp()) + (-500.0f64 / 63.0).exp();
        assert!((los_probability(500.0) - p500).abs() < 1e-15);
        assert!((los_probability(500.0) - 0.0363).abs() < 5e-5);
    }

    #[test]
    fn pathloss_los_short_range() {
        let pl = pathloss_uma(100.0, 2.0, true).unwrap();
        assert!((pl - (44.0 + 28.0 + 20.0 * 2f64.log10())).abs() < 1e-12);
        assert!((pl - 78.02).abs() < 0.01);
    }

    #[test]
    fn breakpoint_at_two_ghz() {
        // 4 · 24 · 0.5 · 2e9 / c
        assert!((breakpoint_distance(2.0) - 320.2215).abs() < 1e-4);
    }

    #[test]
    fn pathloss_range_checked() {
        assert!(matches!(pathloss_uma(5.0, 2.0, true), Err(Error::DistanceOutOfRange(_))));
        assert!(pathloss_uma(5000.1, 2.0, false).is_err());
        assert!(pathloss_uma(10.0, 2.0, false).is_ok());
    }

    #[test]
    fn pathloss_monotone_and_nlos_dominates() {
        for fc in [0.8, 2.0, 3.5] {
            let mut prev = (0.0, 0.0);
            for i in 0..=4990 {
                let d = 10.0 + i as f64;
                let los = pathloss_uma(d, fc, true).unwrap();
                let nlos = pathloss_uma(d, fc, false).unwrap();
                assert!(nlos >= los);
                assert!(los >= prev.0 && nlos >= prev.1, "d={d} fc={fc}");
                assert!(los > 0.0);
                prev = (los, nlos);
            }
        }
    }

    #[test]
    fn ricean_k_values() {
        assert!((ricean_k(100.0) - 10.0).abs() < 1e-12);
        assert!(ricean_k(1300.0 / 3.0).abs() < 1e-12);
        assert!(ricean_k(200.0) < ricean_k(199.0));
    }

    #[test]
    fn shadowing_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let n = 100_000;
        for (los, target) in [(true, 4.0), (false, 6.0)] {
            let xs: Vec<f64> = (0..n).map(|_| sample_shadowing(los, &mut rng)).collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let std = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
            assert!(mean.abs() < 0.1, "mean {mean}");
            assert!((std - target).abs() < 0.15, "std {std}");
        }
        let a = sample_shadowing(false, &mut ChaCha8Rng::seed_from_u64(3));
        let b = sample_shadowing(false, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }

    #[test]
    fn steering_vector_properties() {
        for theta in [-170.0, -45.0, 0.0, 12.5, 90.0] {
            let a = steering_vector(theta, 16);
            assert!(a.iter().all(|c| (c.norm() - 1.0).abs() < 1e-12));
        }
        let broadside = steering_vector(0.0, 8);
        assert!(broadside.iter().all(|c| (c - Complex64::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn pure_los_has_equal_magnitudes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = small_scale(&link(f64::INFINITY, -80.0, 25.0), 32, &mut rng);
        let m = h.0[0].norm();
        assert!((m - 1e-4).abs() < 1e-12);
        assert!(h.0.iter().all(|c| (c.norm() - m).abs() < 1e-15));
        // Phase ramp follows the steering vector.
        let a = steering_vector(25.0, 32);
        let r = h.0[0] / a[0];
        for (hi, ai) in h.0.iter().zip(&a) {
            assert!((hi - r * ai).norm() < 1e-15);
        }
    }

    #[test]
    fn rayleigh_per_antenna_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let l = link(0.0, -70.0, 10.0);
        let g2 = l.gain_linear();
        let n = 100_000;
        let mut acc = [0.0; 4];
        for _ in 0..n {
            let h = small_scale(&l, 4, &mut rng);
            for (a, c) in acc.iter_mut().zip(&h.0) {
                *a += c.norm_sqr();
            }
        }
        for a in acc {
            let ratio = a / n as f64 / g2;
            assert!((ratio - 1.0).abs() < 0.03, "{ratio}");
        }
    }

    #[test]
    fn expected_norm_matches_large_scale_gain() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for k_db in [f64::NEG_INFINITY, 0.0, 10.0] {
            let l = link(db_to_linear(k_db), -95.0, -33.0);
            let n = 20_000;
            let mean = (0..n).map(|_| small_scale(&l, 16, &mut rng).norm_sqr()).sum::<f64>() / n as f64;
            let ratio = mean / (16.0 * l.gain_linear());
            assert!((ratio - 1.0).abs() < 0.03, "K={k_db} dB: {ratio}");
        }
    }

    #[test]
    fn large_scale_links_invariants() {
        let layout = build_layout(500.0, 19).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let drop = drop_ues(&layout, 200, &mut rng).unwrap();
        let links = large_scale_links(&layout, &drop, 2.0, &mut rng).unwrap();
        assert_eq!((links.n_bs(), links.n_ue()), (57, 200));
        for bs in 0..57 {
            for l in links.row(bs) {
                assert!(l.pathloss > 0.0);
                assert!(l.k_factor >= 0.0 && l.k_factor.is_finite());
                assert_eq!(l.los, l.k_factor > 0.0);
            }
        }
    }

    #[test]
    fn assembled_channels_cover_all_pairs_and_reproduce() {
        let layout = build_layout(500.0, 19).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let drop = drop_ues(&layout, 300, &mut rng).unwrap();
        let links = large_scale_links(&layout, &drop, 2.0, &mut rng).unwrap();
        let scheduled: Vec<Vec<usize>> = (0..57).map(|b| vec![b * 5 % 300, (b * 5 + 1) % 300]).collect();
        let make = || {
            assemble_channels(&links, &scheduled, 8, |bs| ChaCha8Rng::seed_from_u64(1000 + bs as u64))
        };
        let a = make();
        assert_eq!(a.n_streams(), 114);
        assert_eq!(a.bs_block(0).len(), 114 * 8);
        assert_eq!(a, make());
        for bs in 0..57 {
            for s in 0..a.n_streams() {
                assert!(a.channel(bs, s).iter().all(|c| c.norm() > 0.0));
            }
        }
    }

    #[test]
    fn cross_cell_variance_tracks_own_link_gain() {
        // A serving link and a much weaker cross-cell link to the same UE.
        let serving = link(0.0, -80.0, 0.0);
        let cross = link(0.0, -110.0, 40.0);
        let links = LinkGrid::from_rows(vec![vec![serving], vec![cross]]);
        let scheduled = vec![vec![0], vec![]];
        let n = 20_000;
        let mut acc = [0.0; 2];
        for i in 0..n {
            let set = assemble_channels(&links, &scheduled, 4, |bs| {
                ChaCha8Rng::seed_from_u64((i as u64) << 8 | bs as u64)
            });
            for (bs, a) in acc.iter_mut().enumerate() {
                *a += norm_sqr(set.channel(bs, 0));
            }
        }
        let r_serving = acc[0] / n as f64 / (4.0 * serving.gain_linear());
        let r_cross = acc[1] / n as f64 / (4.0 * cross.gain_linear());
        assert!((r_serving - 1.0).abs() < 0.03, "{r_serving}");
        assert!((r_cross - 1.0).abs() < 0.03, "{r_cross}");
    }
}
