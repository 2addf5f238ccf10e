//! Pilot-phase and data-phase signal processing for one subframe.
//!
//! Pilot sequences are the canonical orthonormal basis over sequence indices,
//! so column `p` of a BS's received pilot matrix is the superposition of the
//! channels of every UE in the network transmitting on index `p`.

use matrixmultiply::{zgemm, CGemmOption};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::channel::{norm_sqr, ChannelSet};
use crate::error::{Error, Result};
use crate::srs_alloc::{CollisionSets, SrsAssignment};

/// Largest accepted condition number of the estimate Gram matrix.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Received pilot signal at one BS, `N_A × N_P`, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotObservation {
    pub n_antennas: usize,
    pub n_sequences: usize,
    data: Vec<Complex64>,
}

impl PilotObservation {
    pub fn zeros(n_antennas: usize, n_sequences: usize) -> Self {
        Self {
            n_antennas,
            n_sequences,
            data: vec![ZERO; n_antennas * n_sequences],
        }
    }

    pub fn column(&self, sequence: usize) -> &[Complex64] {
        &self.data[sequence * self.n_antennas..(sequence + 1) * self.n_antennas]
    }

    fn column_mut(&mut self, sequence: usize) -> &mut [Complex64] {
        &mut self.data[sequence * self.n_antennas..(sequence + 1) * self.n_antennas]
    }
}

fn check_shapes(channels: &ChannelSet, assignment: &SrsAssignment) -> Result<()> {
    if assignment.per_bs.len() != channels.n_bs() {
        return Err(Error::Shape(format!(
            "assignment covers {} BSs, channels {}",
            assignment.per_bs.len(),
            channels.n_bs()
        )));
    }
    for (bs, list) in assignment.per_bs.iter().enumerate() {
        if list.len() != channels.n_scheduled(bs) {
            return Err(Error::Shape(format!(
                "BS {bs}: {} sequences for {} scheduled UEs",
                list.len(),
                channels.n_scheduled(bs)
            )));
        }
    }
    Ok(())
}

/// Received pilots at every BS: `Y_b = √ρ Σ_j H_{b,j} Φ_j + N_b`.
pub fn received_pilots<R, F>(
    channels: &ChannelSet,
    assignment: &SrsAssignment,
    rho: f64,
    noise_var: f64,
    rng_for_bs: F,
) -> Result<Vec<PilotObservation>>
where
    R: Rng,
    F: Fn(usize) -> R + Sync,
{
    check_shapes(channels, assignment)?;
    let amp = rho.sqrt();
    let noise_amp = (noise_var / 2.0).sqrt();
    let sequences: Vec<usize> = channels
        .streams()
        .iter()
        .map(|&id| assignment.get(id).sequence)
        .collect();
    Ok((0..channels.n_bs())
        .into_par_iter()
        .map(|bs| {
            let mut y = PilotObservation::zeros(channels.n_antennas(), assignment.n_sequences);
            for (s, &seq) in sequences.iter().enumerate() {
                for (acc, h) in y.column_mut(seq).iter_mut().zip(channels.channel(bs, s)) {
                    *acc += h * amp;
                }
            }
            if noise_var > 0.0 {
                let mut rng = rng_for_bs(bs);
                for v in &mut y.data {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    *v += Complex64::new(re * noise_amp, im * noise_amp);
                }
            }
            y
        })
        .collect())
}

/// Per-BS channel estimate, `N_A × N_K`, column `k` for the `k`-th scheduled UE.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub n_antennas: usize,
    pub n_streams: usize,
    data: Vec<Complex64>,
}

impl ChannelEstimate {
    pub fn from_columns(n_antennas: usize, columns: &[Vec<Complex64>]) -> Self {
        assert!(columns.iter().all(|c| c.len() == n_antennas));
        Self {
            n_antennas,
            n_streams: columns.len(),
            data: columns.concat(),
        }
    }

    pub fn column(&self, k: usize) -> &[Complex64] {
        &self.data[k * self.n_antennas..(k + 1) * self.n_antennas]
    }
}

/// Least-squares estimate `Ĥ_b = Y_b Φ_b^H / √ρ`.
pub fn ls_estimate(observation: &PilotObservation, own_sequences: &[usize], rho: f64) -> ChannelEstimate {
    let scale = 1.0 / rho.sqrt();
    let mut data = Vec::with_capacity(observation.n_antennas * own_sequences.len());
    for &seq in own_sequences {
        data.extend(observation.column(seq).iter().map(|y| y * scale));
    }
    ChannelEstimate {
        n_antennas: observation.n_antennas,
        n_streams: own_sequences.len(),
        data,
    }
}

/// Pilot contamination per scheduled UE, watts: `ρ Σ ‖h_{b,collider}‖² / N_A`.
pub fn contamination_power(
    channels: &ChannelSet,
    assignment: &SrsAssignment,
    collisions: &CollisionSets,
    rho: f64,
) -> Vec<Vec<f64>> {
    let n_a = channels.n_antennas() as f64;
    assignment
        .per_bs
        .iter()
        .enumerate()
        .map(|(bs, list)| {
            list.iter()
                .map(|a| {
                    collisions
                        .colliders(bs, a.sequence)
                        .map(|id| norm_sqr(channels.channel(bs, channels.stream_index(id))))
                        .sum::<f64>()
                        * rho
                        / n_a
                })
                .collect()
        })
        .collect()
}

/// ZF precoding vectors of one BS, `N_A × N_K`, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    pub n_antennas: usize,
    pub n_streams: usize,
    pub power: f64,
    data: Vec<Complex64>,
}

impl Precoder {
    pub fn column(&self, k: usize) -> &[Complex64] {
        &self.data[k * self.n_antennas..(k + 1) * self.n_antennas]
    }
}

/// `W = Ĥ (Ĥ^H Ĥ)^{-1}`, each column rescaled to `‖w_k‖² = p_bs / N_K`.
pub fn zf_precoder(estimate: &ChannelEstimate, p_bs: f64) -> Result<Precoder> {
    let (n_a, n_k) = (estimate.n_antennas, estimate.n_streams);
    if n_k == 0 {
        return Ok(Precoder {
            n_antennas: n_a,
            n_streams: 0,
            power: p_bs,
            data: Vec::new(),
        });
    }
    if n_k > n_a {
        return Err(Error::Shape(format!(
            "ZF needs N_A ≥ N_K, got {n_a} antennas for {n_k} UEs"
        )));
    }
    let h = DMatrix::from_column_slice(n_a, n_k, &estimate.data);
    let gram = h.adjoint() * &h;
    let eig = gram.clone().symmetric_eigenvalues();
    let (lo, hi) = eig
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    let condition = hi / lo;
    if !(lo > 0.0 && condition <= MAX_GRAM_CONDITION) {
        return Err(Error::RankDeficient {
            condition: if lo > 0.0 { condition } else { f64::INFINITY },
        });
    }
    let inv = gram
        .cholesky()
        .ok_or(Error::RankDeficient {
            condition: f64::INFINITY,
        })?
        .inverse();
    let mut w = h * inv;
    let target = (p_bs / n_k as f64).sqrt();
    for mut col in w.column_iter_mut() {
        let n = col.norm();
        col *= Complex64::new(target / n, 0.0);
    }
    Ok(Precoder {
        n_antennas: n_a,
        n_streams: n_k,
        power: p_bs,
        data: w.as_slice().to_vec(),
    })
}

/// Splits a complex vector into separate real and imaginary parts.
/// `G = H · conj(W)` for one BS: row `s` holds `conj(h_s^H w_k)` for every
/// precoder column `k`, so `|G[s][k]|² = |h_s^H w_k|²`.
fn projections(h: &[Complex64], n_antennas: usize, precoder: &Precoder) -> Vec<Complex64> {
    let n_rows = h.len() / n_antennas;
    let n_cols = precoder.n_streams;
    let w: Vec<Complex64> = precoder.data.iter().map(|c| c.conj()).collect();
    let mut g = vec![ZERO; n_rows * n_cols];
    if g.is_empty() {
        return g;
    }
    // SAFETY: Complex64 is repr(C) with the same layout as [f64; 2]; `h` is
    // n_rows × n_antennas row-major, `w` is n_antennas × n_cols column-major
    // and `g` is n_rows × n_cols row-major, all with matching lengths.
    unsafe {
        zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            n_rows,
            n_antennas,
            n_cols,
            [1.0, 0.0],
            h.as_ptr().cast(),
            n_antennas as isize,
            1,
            w.as_ptr().cast(),
            1,
            n_antennas as isize,
            [0.0, 0.0],
            g.as_mut_ptr().cast(),
            n_cols as isize,
            1,
        );
    }
    g
}

/// Downlink SINR of every scheduled UE:
/// `|h_{k,b}^H w_{k,b}|² / (Σ_{(j,k′) ≠ (b,k)} |h_{k,(j)}^H w_{k′,j}|² + σ²)`.
///
/// `precoders[j]` must hold one column per UE scheduled by BS `j`.
pub fn dl_sinr(channels: &ChannelSet, precoders: &[Precoder], noise_var_ue: f64) -> Result<Vec<Vec<f64>>> {
    if precoders.len() != channels.n_bs() {
        return Err(Error::Shape(format!(
            "{} precoders for {} BSs",
            precoders.len(),
            channels.n_bs()
        )));
    }
    for (bs, p) in precoders.iter().enumerate() {
        if p.n_streams != channels.n_scheduled(bs) || (p.n_streams > 0 && p.n_antennas != channels.n_antennas()) {
            return Err(Error::Shape(format!("precoder of BS {bs} does not match its schedule")));
        }
    }
    let n_streams = channels.n_streams();
    let streams = channels.streams();

    // Received power from each BS j, summed over its streams; plus the desired term.
    type Received = (Vec<f64>, Vec<(usize, f64)>);
    let per_bs: Vec<Received> = (0..channels.n_bs())
        .into_par_iter()
        .map(|j| {
            let p = &precoders[j];
            let mut total = vec![0.0; n_streams];
            let mut desired = Vec::with_capacity(p.n_streams);
            if p.n_streams == 0 {
                return (total, desired);
            }
            let g = projections(channels.bs_block(j), channels.n_antennas(), p);
            for (s, (t, row)) in total.iter_mut().zip(g.chunks_exact(p.n_streams)).enumerate() {
                *t = row.iter().map(|x| x.norm_sqr()).sum();
                if streams[s].bs == j {
                    desired.push((s, row[streams[s].slot].norm_sqr()));
                }
            }
            (total, desired)
        })
        .collect();

    let mut total = vec![0.0; n_streams];
    let mut signal = vec![0.0; n_streams];
    for (t, d) in &per_bs {
        for (acc, x) in total.iter_mut().zip(t) {
            *acc += x;
        }
        for &(s, pw) in d {
            signal[s] = pw;
        }
    }
    let mut out: Vec<Vec<f64>> = (0..channels.n_bs())
        .map(|bs| Vec::with_capacity(channels.n_scheduled(bs)))
        .collect();
    for (s, id) in streams.iter().enumerate() {
        let interference = (total[s] - signal[s]).max(0.0);
        out[id.bs].push(signal[s] / (interference + noise_var_ue));
    }
    Ok(out)
}

/// Sum downlink throughput of one BS in bit/s: `(1 − τ/T) Σ_k B log2(1 + γ_k)`.
pub fn bs_throughput(sinrs: &[f64], tau: usize, t_total: usize, bandwidth: f64) -> f64 {
    assert!(tau <= t_total, "tau exceeds the subframe");
    let overhead = 1.0 - tau as f64 / t_total as f64;
    overhead * sinrs.iter().map(|g| bandwidth * (1.0 + g).log2()).sum::<f64>()
}
