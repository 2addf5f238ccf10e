//! SRS sequence pool, the four allocation schemes and collision bookkeeping.
//!
//! Sequences are modelled at the index level: indices `[0, n_sequences)` are
//! mutually orthogonal and two UEs interfere on the pilot resource only when
//! they hold the same index. The protected block occupies the lowest indices
//! (three equal per-sector partitions), the shared block the rest.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::StreamId;
use crate::error::{Error, Result};
use crate::geometry::{sector_of, SECTORS_PER_SITE};

/// Orthogonal SRS sequences per training OFDM symbol (2 combs × 8 cyclic shifts).
pub const SEQUENCES_PER_SYMBOL: usize = 16;
/// OFDM symbols per subframe.
pub const SUBFRAME_SYMBOLS: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "reuse1")]
    Reuse1,
    #[serde(rename = "reuse3")]
    Reuse3,
    #[serde(rename = "fr-cc")]
    FrCc,
    #[serde(rename = "fr-na")]
    FrNa,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Reuse1, Scheme::Reuse3, Scheme::FrCc, Scheme::FrNa];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Reuse1 => "reuse1",
            Scheme::Reuse3 => "reuse3",
            Scheme::FrCc => "fr-cc",
            Scheme::FrNa => "fr-na",
        }
    }

    pub fn is_fractional(self) -> bool {
        matches!(self, Scheme::FrCc | Scheme::FrNa)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown scheme '{s}' (expected reuse1 | reuse3 | fr-cc | fr-na)"
                ))
            })
    }
}

/// Pool size for `tau` training symbols.
pub fn pool_capacity(tau: usize) -> Result<usize> {
    if !(1..=SUBFRAME_SYMBOLS).contains(&tau) {
        return Err(Error::InvalidParameter(format!(
            "tau must be in [1, {SUBFRAME_SYMBOLS}], got {tau}"
        )));
    }
    Ok(SEQUENCES_PER_SYMBOL * tau)
}

/// Largest number of UEs per BS that a pool of `n_sequences` can train when
/// a fraction `beta_pr` of them must be site-orthogonal.
pub fn max_scheduled(n_sequences: usize, beta_pr: f64) -> usize {
    assert!((0.0..=1.0).contains(&beta_pr), "beta_pr must lie in [0, 1]");
    (n_sequences as f64 / (3.0 * beta_pr + (1.0 - beta_pr))).floor() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrsPool {
    pub tau: usize,
    pub n_sequences: usize,
    pub beta_pr: f64,
    pub protected_count: usize,
    pub shared_count: usize,
}

impl SrsPool {
    /// Pool whose protected block is the fraction `beta_pr` of all sequences,
    /// rounded down to a multiple of three.
    pub fn new(tau: usize, beta_pr: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta_pr) {
            return Err(Error::InvalidParameter(format!(
                "beta_pr must lie in [0, 1], got {beta_pr}"
            )));
        }
        let n = pool_capacity(tau)?;
        let per_sector = ((beta_pr * n as f64 + 1e-9).floor() as usize) / SECTORS_PER_SITE;
        Self::with_partition(tau, per_sector)
    }

    /// Pool reserving `per_sector` protected sequences for each of the three
    /// co-located sectors; every remaining sequence is shared.
    pub fn with_partition(tau: usize, per_sector: usize) -> Result<Self> {
        let n = pool_capacity(tau)?;
        let protected_count = SECTORS_PER_SITE * per_sector;
        if protected_count > n {
            return Err(Error::Budget(format!(
                "{per_sector} protected sequences per sector need {protected_count}, have {n}"
            )));
        }
        Ok(Self {
            tau,
            n_sequences: n,
            beta_pr: protected_count as f64 / n as f64,
            protected_count,
            shared_count: n - protected_count,
        })
    }

    pub fn reuse1(tau: usize) -> Result<Self> {
        Self::with_partition(tau, 0)
    }

    pub fn reuse3(tau: usize) -> Result<Self> {
        Self::with_partition(tau, pool_capacity(tau)? / SECTORS_PER_SITE)
    }

    pub fn partition_size(&self) -> usize {
        self.protected_count / SECTORS_PER_SITE
    }

    /// Protected indices reserved for `sector`.
    pub fn partition(&self, sector: usize) -> Range<usize> {
        let m = self.partition_size();
        sector * m..(sector + 1) * m
    }

    pub fn shared_range(&self) -> Range<usize> {
        self.protected_count..self.n_sequences
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResourceKind {
    Protected,
    Shared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Assigned {
    pub sequence: usize,
    pub kind: ResourceKind,
}

/// Sequence held by each scheduled UE, aligned with the per-BS scheduled lists.
#[derive(Debug, Clone, PartialEq)]
pub struct SrsAssignment {
    pub n_sequences: usize,
    pub per_bs: Vec<Vec<Assigned>>,
}

impl SrsAssignment {
    pub fn get(&self, id: StreamId) -> Assigned {
        self.per_bs[id.bs][id.slot]
    }

    pub fn sequences(&self, bs: usize) -> Vec<usize> {
        self.per_bs[bs].iter().map(|a| a.sequence).collect()
    }

    pub fn n_protected(&self, bs: usize) -> usize {
        self.per_bs[bs]
            .iter()
            .filter(|a| a.kind == ResourceKind::Protected)
            .count()
    }
}

fn draw<R: Rng + ?Sized>(range: Range<usize>, amount: usize, rng: &mut R) -> Vec<usize> {
    let start = range.start;
    sample(rng, range.len(), amount)
        .into_iter()
        .map(|i| start + i)
        .collect()
}

/// Every BS draws its sequences uniformly from the whole pool.
pub fn allocate_reuse1<R: Rng + ?Sized>(
    pool: &SrsPool,
    scheduled: &[Vec<usize>],
    rng: &mut R,
) -> Result<SrsAssignment> {
    let per_bs = scheduled
        .iter()
        .enumerate()
        .map(|(bs, list)| {
            if list.len() > pool.n_sequences {
                return Err(Error::Budget(format!(
                    "BS {bs} schedules {} UEs, pool has {} sequences",
                    list.len(),
                    pool.n_sequences
                )));
            }
            Ok(draw(0..pool.n_sequences, list.len(), rng)
                .into_iter()
                .map(|sequence| Assigned {
                    sequence,
                    kind: ResourceKind::Shared,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(SrsAssignment {
        n_sequences: pool.n_sequences,
        per_bs,
    })
}

/// Sector `s` of every site draws only from the `s`-th third of the pool.
pub fn allocate_reuse3<R: Rng + ?Sized>(
    pool: &SrsPool,
    scheduled: &[Vec<usize>],
    rng: &mut R,
) -> Result<SrsAssignment> {
    let third = pool.n_sequences / SECTORS_PER_SITE;
    let per_bs = scheduled
        .iter()
        .enumerate()
        .map(|(bs, list)| {
            if list.len() > third {
                return Err(Error::Budget(format!(
                    "BS {bs} schedules {} UEs, Reuse 3 allows floor({}/3) = {third}",
                    list.len(),
                    pool.n_sequences
                )));
            }
            let s = sector_of(bs);
            Ok(draw(s * third..(s + 1) * third, list.len(), rng)
                .into_iter()
                .map(|sequence| Assigned {
                    sequence,
                    kind: ResourceKind::Protected,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(SrsAssignment {
        n_sequences: pool.n_sequences,
        per_bs,
    })
}

/// Cell-centric order: ascending received power at the serving BS, so the
/// weakest (cell-edge) UEs come first and are protected first.
pub fn rank_cell_centric(serving_powers_db: &[(usize, f64)]) -> Vec<usize> {
    let mut v = serving_powers_db.to_vec();
    v.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    v.into_iter().map(|(ue, _)| ue).collect()
}

/// Neighbour-aware order: descending strongest power towards any other BS,
/// so the UEs that leak the most pilot energy into neighbours are protected first.
pub fn rank_neighbour_aware(neighbour_powers_db: &[(usize, f64)]) -> Vec<usize> {
    let mut v = neighbour_powers_db.to_vec();
    v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    v.into_iter().map(|(ue, _)| ue).collect()
}

/// Fractional reuse: the first `min(N_K, partition_size)` UEs of each BS's
/// ranking take protected sequences from the sector partition, the rest draw
/// from the network-wide shared block.
pub fn allocate_fractional<R: Rng + ?Sized>(
    pool: &SrsPool,
    scheduled: &[Vec<usize>],
    rankings: &[Vec<usize>],
    rng: &mut R,
) -> Result<SrsAssignment> {
    if rankings.len() != scheduled.len() {
        return Err(Error::Shape(format!(
            "{} rankings for {} BSs",
            rankings.len(),
            scheduled.len()
        )));
    }
    let mut per_bs = Vec::with_capacity(scheduled.len());
    for (bs, (list, ranking)) in scheduled.iter().zip(rankings).enumerate() {
        let n_k = list.len();
        if ranking.len() < n_k {
            return Err(Error::Ranking {
                bs,
                reason: format!("{} entries for {n_k} scheduled UEs", ranking.len()),
            });
        }
        let n_protected = n_k.min(pool.partition_size());
        let n_shared = n_k - n_protected;
        if n_shared > pool.shared_count {
            return Err(Error::Budget(format!(
                "N_K={n_k} needs ≥ 3·{n_protected}+{n_shared} = {} sequences, have {}",
                pool.protected_count + n_shared,
                pool.n_sequences
            )));
        }
        let protected_seqs = draw(pool.partition(sector_of(bs)), n_protected, rng);
        let shared_seqs = draw(pool.shared_range(), n_shared, rng);

        let mut slots: Vec<Option<Assigned>> = vec![None; n_k];
        let seqs = protected_seqs
            .into_iter()
            .map(|s| (s, ResourceKind::Protected))
            .chain(shared_seqs.into_iter().map(|s| (s, ResourceKind::Shared)));
        for (&ue, (sequence, kind)) in ranking.iter().take(n_k).zip(seqs) {
            let slot = list.iter().position(|&u| u == ue).ok_or_else(|| Error::Ranking {
                bs,
                reason: format!("UE {ue} is not scheduled"),
            })?;
            if slots[slot].is_some() {
                return Err(Error::Ranking {
                    bs,
                    reason: format!("UE {ue} ranked twice"),
                });
            }
            slots[slot] = Some(Assigned { sequence, kind });
        }
        per_bs.push(slots.into_iter().map(|a| a.expect("every slot ranked")).collect());
    }
    Ok(SrsAssignment {
        n_sequences: pool.n_sequences,
        per_bs,
    })
}

/// Streams grouped by sequence index.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionSets {
    by_sequence: Vec<Vec<StreamId>>,
}

impl CollisionSets {
    /// Other-cell streams sharing `sequence` with BS `bs`.
    pub fn colliders(&self, bs: usize, sequence: usize) -> impl Iterator<Item = StreamId> + '_ {
        self.by_sequence[sequence].iter().copied().filter(move |s| s.bs != bs)
    }

    pub fn users_of(&self, sequence: usize) -> &[StreamId] {
        &self.by_sequence[sequence]
    }
}

pub fn collision_sets(assignment: &SrsAssignment) -> CollisionSets {
    let mut by_sequence = vec![Vec::new(); assignment.n_sequences];
    for (bs, list) in assignment.per_bs.iter().enumerate() {
        for (slot, a) in list.iter().enumerate() {
            by_sequence[a.sequence].push(StreamId { bs, slot });
        }
    }
    CollisionSets { by_sequence }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::site_of;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// 57 BSs scheduling UEs `bs*100 .. bs*100 + n_k`.
    fn scheduled(n_bs: usize, n_k: usize) -> Vec<Vec<usize>> {
        (0..n_bs).map(|b| (0..n_k).map(|k| b * 100 + k).collect()).collect()
    }

    fn assert_unique_per_bs(a: &SrsAssignment) {
        for list in &a.per_bs {
            let set: HashSet<_> = list.iter().map(|x| x.sequence).collect();
            assert_eq!(set.len(), list.len());
            assert!(list.iter().all(|x| x.sequence < a.n_sequences));
        }
    }

    fn assert_protected_site_orthogonal(a: &SrsAssignment) {
        for b1 in 0..a.per_bs.len() {
            for b2 in 0..a.per_bs.len() {
                if b1 == b2 || site_of(b1) != site_of(b2) {
                    continue;
                }
                for x in a.per_bs[b1].iter().filter(|x| x.kind == ResourceKind::Protected) {
                    assert!(a.per_bs[b2].iter().all(|y| y.sequence != x.sequence));
                }
            }
        }
    }

    #[test]
    fn pool_capacity_values() {
        assert_eq!(pool_capacity(1).unwrap(), 16);
        assert_eq!(pool_capacity(3).unwrap(), 48);
        assert_eq!(pool_capacity(14).unwrap(), 224);
        assert!(pool_capacity(0).is_err());
        assert!(pool_capacity(15).is_err());
    }

    #[test]
    fn max_scheduled_values() {
        assert_eq!(max_scheduled(96, 1.0), 32);
        assert_eq!(max_scheduled(64, 0.0), 64);
        assert_eq!(max_scheduled(64, 0.5), 32);
        assert_eq!(max_scheduled(64, 1.0), 21);
    }

    proptest! {
        #[test]
        fn max_scheduled_non_increasing(n in 16usize..=224, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(max_scheduled(n, hi) <= max_scheduled(n, lo));
            prop_assert_eq!(max_scheduled(n, 0.0), n);
            prop_assert_eq!(max_scheduled(n, 1.0), n / 3);
        }
    }

    #[test]
    fn pool_partitions() {
        let p = SrsPool::new(4, 0.5).unwrap();
        assert_eq!(p.n_sequences, 64);
        assert_eq!(p.protected_count, 30);
        assert_eq!(p.shared_count, 34);
        assert_eq!(p.partition(2), 20..30);
        assert_eq!(p.shared_range(), 30..64);

        let p = SrsPool::with_partition(6, 16).unwrap();
        assert_eq!((p.protected_count, p.shared_count), (48, 48));
        assert_eq!(SrsPool::reuse3(4).unwrap().partition_size(), 21);
        assert_eq!(SrsPool::reuse1(2).unwrap().protected_count, 0);
        assert!(SrsPool::with_partition(2, 11).is_err());
        assert!(SrsPool::new(2, 1.5).is_err());
    }

    #[test]
    fn reuse1_full_load_uses_every_index_everywhere() {
        let pool = SrsPool::reuse1(2).unwrap();
        let a = allocate_reuse1(&pool, &scheduled(57, 32), &mut rng(1)).unwrap();
        assert_unique_per_bs(&a);
        let c = collision_sets(&a);
        for bs in 0..57 {
            for seq in a.sequences(bs) {
                assert_eq!(c.colliders(bs, seq).count(), 56);
            }
        }
    }

    #[test]
    fn reuse1_single_ue_collision_rate() {
        // One UE per BS on a 224-sequence pool: P(collision) = 1 − (1 − 1/224)^56.
        let pool = SrsPool::reuse1(14).unwrap();
        let analytic = 1.0 - (1.0 - 1.0 / 224.0f64).powi(56);
        let mut r = rng(2);
        let trials = 4000;
        let mut hits = 0;
        for _ in 0..trials {
            let a = allocate_reuse1(&pool, &scheduled(57, 1), &mut r).unwrap();
            let c = collision_sets(&a);
            if c.colliders(0, a.per_bs[0][0].sequence).count() > 0 {
                hits += 1;
            }
        }
        let p = hits as f64 / trials as f64;
        let sigma = (analytic * (1.0 - analytic) / trials as f64).sqrt();
        assert!((p - analytic).abs() < 4.0 * sigma, "{p} vs {analytic}");
    }

    #[test]
    fn reuse1_budget_violation() {
        let pool = SrsPool::reuse1(1).unwrap();
        assert!(matches!(
            allocate_reuse1(&pool, &scheduled(3, 17), &mut rng(0)),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn reuse3_is_site_orthogonal_but_reuses_across_sites() {
        let pool = SrsPool::reuse3(6).unwrap();
        let a = allocate_reuse3(&pool, &scheduled(57, 32), &mut rng(3)).unwrap();
        assert_unique_per_bs(&a);
        assert_protected_site_orthogonal(&a);
        let c = collision_sets(&a);
        // Full partitions: every sequence is reused by the same sector of all 18 other sites.
        for bs in 0..57 {
            for seq in a.sequences(bs) {
                let col: Vec<_> = c.colliders(bs, seq).collect();
                assert_eq!(col.len(), 18);
                assert!(col.iter().all(|s| site_of(s.bs) != site_of(bs)));
                assert!(col.iter().all(|s| sector_of(s.bs) == sector_of(bs)));
            }
        }
        assert!(allocate_reuse3(&SrsPool::reuse3(2).unwrap(), &scheduled(3, 32), &mut rng(0)).is_err());
    }

    #[test]
    fn rankings() {
        let cc = rank_cell_centric(&[(1, -80.0), (2, -100.0), (3, -90.0)]);
        assert_eq!(cc, vec![2, 3, 1]);
        let na = rank_neighbour_aware(&[(1, -70.0), (2, -110.0), (3, -90.0)]);
        assert_eq!(na[0], 1);
        assert_eq!(rank_cell_centric(&[(5, -1.0), (2, -1.0), (9, -1.0)]), vec![2, 5, 9]);
        assert_eq!(rank_neighbour_aware(&[(5, -1.0), (2, -1.0), (9, -1.0)]), vec![2, 5, 9]);
    }

    proptest! {
        #[test]
        fn rankings_invariant_to_offset(powers in prop::collection::vec(-140.0f64..-40.0, 1..40), c in -50.0f64..50.0) {
            let base: Vec<(usize, f64)> = powers.iter().copied().enumerate().collect();
            let shifted: Vec<(usize, f64)> = base.iter().map(|&(u, p)| (u, p + c)).collect();
            prop_assert_eq!(rank_cell_centric(&base), rank_cell_centric(&shifted));
            prop_assert_eq!(rank_neighbour_aware(&base), rank_neighbour_aware(&shifted));
        }
    }

    #[test]
    fn fractional_sixteen_protected_at_tau_six() {
        // tau = 6, 32 UEs of which 16 protected.
        let pool = SrsPool::with_partition(6, 16).unwrap();
        let sched = scheduled(57, 32);
        let rankings: Vec<Vec<usize>> = sched.iter().map(|l| l.iter().rev().copied().collect()).collect();
        let a = allocate_fractional(&pool, &sched, &rankings, &mut rng(4)).unwrap();
        assert_unique_per_bs(&a);
        assert_protected_site_orthogonal(&a);
        for (bs, list) in a.per_bs.iter().enumerate() {
            assert_eq!(a.n_protected(bs), 16);
            for (slot, x) in list.iter().enumerate() {
                // Reversed ranking: the last 16 slots are the protected ones.
                let expect = if slot >= 16 {
                    ResourceKind::Protected
                } else {
                    ResourceKind::Shared
                };
                assert_eq!(x.kind, expect);
                match x.kind {
                    ResourceKind::Protected => assert!(pool.partition(sector_of(bs)).contains(&x.sequence)),
                    ResourceKind::Shared => assert!(pool.shared_range().contains(&x.sequence)),
                }
            }
        }
        // Per site: 48 protected indices plus the shared ones, all within 96.
        let used: HashSet<usize> = (0..3).flat_map(|b| a.sequences(b)).collect();
        assert!(used.len() <= 96);
    }

    #[test]
    fn fractional_budget_message() {
        let pool = SrsPool::with_partition(4, 10).unwrap();
        let sched = scheduled(3, 45);
        let err = allocate_fractional(&pool, &sched, &sched, &mut rng(0)).unwrap_err();
        assert!(err.to_string().contains("needs ≥ 3·10+35 = 65 sequences, have 64"), "{err}");
        let ok = allocate_fractional(&pool, &scheduled(3, 44), &scheduled(3, 44), &mut rng(0));
        assert!(ok.is_ok());
    }

    #[test]
    fn fractional_ranking_errors() {
        let pool = SrsPool::with_partition(6, 16).unwrap();
        let sched = scheduled(2, 4);
        let short = vec![vec![0, 1, 2], vec![100, 101, 102, 103]];
        assert!(matches!(
            allocate_fractional(&pool, &sched, &short, &mut rng(0)),
            Err(Error::Ranking { bs: 0, .. })
        ));
        let foreign = vec![vec![0, 1, 2, 7], vec![100, 101, 102, 103]];
        assert!(allocate_fractional(&pool, &sched, &foreign, &mut rng(0)).is_err());
    }

    /// Histogram of (bs, slot, sequence) triples over many draws.
    fn histogram(f: impl Fn(&mut ChaCha8Rng) -> SrsAssignment, trials: usize) -> Vec<f64> {
        let mut r = rng(99);
        let mut h = Vec::new();
        for _ in 0..trials {
            let a = f(&mut r);
            if h.is_empty() {
                h = vec![0.0; a.per_bs.len() * a.n_sequences];
            }
            for (bs, list) in a.per_bs.iter().enumerate() {
                for x in list {
                    h[bs * a.n_sequences + x.sequence] += 1.0 / trials as f64;
                }
            }
        }
        h
    }

    #[test]
    fn fractional_degenerates_to_fixed_reuse() {
        let sched = scheduled(6, 5);
        let trials = 6000;
        let tol = 4.0 * (0.5f64 * 0.5 / trials as f64).sqrt();

        let p0 = SrsPool::new(2, 0.0).unwrap();
        let fr = histogram(|r| allocate_fractional(&p0, &sched, &sched, r).unwrap(), trials);
        let r1 = histogram(|r| allocate_reuse1(&p0, &sched, r).unwrap(), trials);
        assert!(fr.iter().zip(&r1).all(|(a, b)| (a - b).abs() < tol));

        let p1 = SrsPool::new(2, 1.0).unwrap();
        let fr = histogram(|r| allocate_fractional(&p1, &sched, &sched, r).unwrap(), trials);
        let r3 = histogram(|r| allocate_reuse3(&p1, &sched, r).unwrap(), trials);
        assert!(fr.iter().zip(&r3).all(|(a, b)| (a - b).abs() < tol));
        let a = allocate_fractional(&p1, &sched, &sched, &mut rng(5)).unwrap();
        assert!(a.per_bs.iter().flatten().all(|x| x.kind == ResourceKind::Protected));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn allocation_invariants(seed in any::<u64>(), tau in 1usize..=14, scheme in 0usize..4, n_k_frac in 0.0f64..1.0, p_frac in 0.0f64..1.0) {
            let n = 16 * tau;
            let mut r = rng(seed);
            let (pool, n_k) = match scheme {
                0 => (SrsPool::reuse1(tau).unwrap(), 1 + (n_k_frac * (n - 1) as f64) as usize),
                1 => (SrsPool::reuse3(tau).unwrap(), 1 + (n_k_frac * (n / 3 - 1) as f64) as usize),
                _ => {
                    let per_sector = (p_frac * (n / 3) as f64) as usize;
                    let pool = SrsPool::with_partition(tau, per_sector).unwrap();
                    let n_k = per_sector + (n_k_frac * pool.shared_count as f64) as usize;
                    (pool, n_k.max(1))
                }
            };
            let sched = scheduled(9, n_k);
            let a = match scheme {
                0 => allocate_reuse1(&pool, &sched, &mut r).unwrap(),
                1 => allocate_reuse3(&pool, &sched, &mut r).unwrap(),
                _ => allocate_fractional(&pool, &sched, &sched, &mut r).unwrap(),
            };
            assert_unique_per_bs(&a);
            assert_protected_site_orthogonal(&a);
            if scheme >= 2 {
                let expect = n_k.min(pool.partition_size());
                for bs in 0..9 {
                    prop_assert_eq!(a.n_protected(bs), expect);
                }
            }

            // Collision sets against an O(n²) double loop, plus symmetry.
            let c = collision_sets(&a);
            for (b1, l1) in a.per_bs.iter().enumerate() {
                for x in l1 {
                    let mut brute = Vec::new();
                    for (b2, l2) in a.per_bs.iter().enumerate() {
                        for (s2, y) in l2.iter().enumerate() {
                            if b2 != b1 && y.sequence == x.sequence {
                                brute.push(StreamId { bs: b2, slot: s2 });
                            }
                        }
                    }
                    let got: Vec<_> = c.colliders(b1, x.sequence).collect();
                    prop_assert_eq!(&got, &brute);
                    for other in got {
                        prop_assert!(c.colliders(other.bs, x.sequence).any(|s| s.bs == b1));
                    }
                }
            }
        }
    }
}
