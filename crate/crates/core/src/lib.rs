//! Link-level simulation and channel-blind control for active and passive
//! RIS-assisted MIMO-OFDM.
//!
//! The crate is organised bottom-up:
//!
//! * [`ris`] models the element chain (phase shifter, amplifier, splitter),
//!   the diagonal transmission matrix and the array power draw.
//! * [`channel`] builds per-subcarrier channel matrices for the direct,
//!   antenna-mode and structural-mode paths from a geometric scenario.
//! * [`link`] implements the receive equation with amplifier noise,
//!   whitening, capacity/SNR, Gray QAM and LMMSE detection.
//! * [`control`] holds the blind search algorithms (BG, CSM, MPC and an
//!   exhaustive reference) which see the channel only through a probe oracle.
//! * [`harness`] runs seeded studies (state tables, maps, sweeps,
//!   efficiency curves) and defines the result formats.
//!
//! Data-parallel work units go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and a plain iterator otherwise. Results do
//! not depend on the schedule.

pub mod channel;
pub mod control;
pub mod error;
pub mod harness;
pub mod link;
pub mod par;
pub mod ris;
pub mod seed;

pub use error::{Error, Result};

/// Complex sample type used throughout.
pub type C64 = num_complex::Complex64;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Power ratio in dB to linear.
#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear power ratio to dB.
#[inline]
pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}
