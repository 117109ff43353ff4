use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::detect::{lmmse_detect, transmit};
use super::metrics::{capacity, snr};
use super::noise::{ris_noise_cov, whiten, NoiseSpec};
use super::qam::QamConstellation;
use crate::channel::{compose_channel, compose_without_ris, ChannelSet};
use crate::ris::Phi;
use crate::seed::derive_rng;
use crate::{linear_to_db, par, Error, Result, C64};

/// Subcarrier-averaged link figures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkMetrics {
    /// Mean capacity over subcarriers, bps/Hz.
    pub capacity: f64,
    /// SNR of the subcarrier-mean linear SNR, dB.
    pub snr_db: f64,
    pub uncoded_ber: f64,
}

/// What the RIS contributes to the channel being measured.
#[derive(Debug, Clone, PartialEq)]
pub enum RisState {
    /// RIS removed. The plate's structural-mode reflection stays when
    /// `include_sm` is set.
    Absent { include_sm: bool },
    /// RIS present with the given transmission matrix.
    Configured(Phi),
}

/// `R_n = R_v + σ_z² I` for one subcarrier.
pub fn noise_covariance(
    cs: &ChannelSet,
    state: &RisState,
    noise: &NoiseSpec,
    subcarrier: usize,
) -> Result<DMatrix<C64>> {
    let n_r = cs.n_r();
    let white = DMatrix::<C64>::identity(n_r, n_r) * C64::new(noise.sigma_z2, 0.0);
    match state {
        RisState::Absent { .. } => Ok(white),
        RisState::Configured(phi) => Ok(ris_noise_cov(&cs.subcarrier(subcarrier).am_r, phi, noise.sigma_v2)? + white),
    }
}

fn channel(cs: &ChannelSet, state: &RisState, sc: usize) -> Result<DMatrix<C64>> {
    match state {
        RisState::Absent { include_sm } => compose_without_ris(cs, sc, *include_sm),
        RisState::Configured(phi) => compose_channel(cs, phi, sc),
    }
}

/// Capacity and linear SNR of one subcarrier.
pub fn subcarrier_metrics(
    cs: &ChannelSet,
    state: &RisState,
    noise: &NoiseSpec,
    subcarrier: usize,
) -> Result<(f64, f64)> {
    let h = channel(cs, state, subcarrier)?;
    let r_n = noise_covariance(cs, state, noise, subcarrier)?;
    let w = whiten(&h, &r_n)?;
    Ok((capacity(&w.h_tilde), snr(&w.h_tilde)))
}

struct ScTally {
    capacity: f64,
    snr: f64,
    bit_errors: u64,
    bits: u64,
}

/// Capacity, SNR and uncoded BER averaged over subcarriers.
///
/// Each subcarrier sends `n_frames` random symbol vectors through
/// [`transmit`] and [`lmmse_detect`]. Subcarrier `i` draws from its own
/// stream derived from `(seed, i)`, so the result is independent of how the
/// subcarriers are scheduled.
pub fn measure_link(
    cs: &ChannelSet,
    state: &RisState,
    noise: &NoiseSpec,
    constellation: &QamConstellation,
    n_frames: usize,
    seed: u64,
) -> Result<LinkMetrics> {
    if n_frames == 0 {
        return Err(Error::invalid("n_frames must be >= 1"));
    }
    noise.validate()?;
    if let RisState::Configured(phi) = state {
        if phi.len() != cs.k() {
            return Err(Error::invalid(format!("Φ has {} entries, K = {}", phi.len(), cs.k())));
        }
    }
    let n_t = cs.n_t();
    let tallies = par::try_map_range(cs.n_sc(), |sc| -> Result<ScTally> {
        let h = channel(cs, state, sc)?;
        let r_n = noise_covariance(cs, state, noise, sc)?;
        let w = whiten(&h, &r_n)?;
        let ris = match state {
            RisState::Configured(phi) => Some((&cs.subcarrier(sc).am_r, phi)),
            RisState::Absent { .. } => None,
        };
        let mut rng = derive_rng(seed, &[sc as u64]);
        let mut bit_errors = 0u64;
        for _ in 0..n_frames {
            let labels: Vec<usize> = (0..n_t).map(|_| rng.random_range(0..constellation.order())).collect();
            let s = DVector::from_iterator(n_t, labels.iter().map(|&l| constellation.map(l)));
            let y = transmit(&h, ris, &s, noise, &mut rng)?;
            let det = lmmse_detect(&y, &h, &r_n, constellation)?;
            bit_errors += labels
                .iter()
                .zip(&det.labels)
                .map(|(&a, &b)| constellation.bit_errors(a, b) as u64)
                .sum::<u64>();
        }
        Ok(ScTally {
            capacity: capacity(&w.h_tilde),
            snr: snr(&w.h_tilde),
            bit_errors,
            bits: (n_frames * n_t * constellation.bits_per_symbol()) as u64,
        })
    })?;
    let n = tallies.len() as f64;
    let cap = tallies.iter().map(|t| t.capacity).sum::<f64>() / n;
    let snr_lin = tallies.iter().map(|t| t.snr).sum::<f64>() / n;
    let errs: u64 = tallies.iter().map(|t| t.bit_errors).sum();
    let bits: u64 = tallies.iter().map(|t| t.bits).sum();
    Ok(LinkMetrics {
        capacity: cap,
        snr_db: linear_to_db(snr_lin),
        uncoded_ber: errs as f64 / bits as f64,
    })
}
