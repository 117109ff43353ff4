//! Receive equation, whitening, capacity/SNR and uncoded BER.
//!
//! The received vector on one subcarrier is `y = H s + H_am_r Φ v + z`; the
//! amplifier noise `v` is coloured by the RIS→Rx channel, so every metric is
//! computed after whitening with `R_n^{-1/2}`.

mod detect;
mod measure;
mod metrics;
mod noise;
mod qam;

pub use detect::{lmmse_detect, ml_detect, transmit, Detection};
pub use measure::{measure_link, noise_covariance, subcarrier_metrics, LinkMetrics, RisState};
pub use metrics::{capacity, snr, snr_db};
pub use noise::{inv_sqrt_hermitian, ris_noise_cov, whiten, NoiseSpec, WhitenedChannel};
pub use qam::QamConstellation;

/// Uncoded BER below which a link counts as operable (rate-1/2 LDPC can
/// clean up the rest).
pub const BER_THRESHOLD: f64 = 5e-2;
