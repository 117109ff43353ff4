//! Per-subcarrier channel matrices for the three path classes.
//!
//! A [`ScenarioGeometry`] places the Tx, Rx and RIS arrays plus a set of
//! point scatterers. [`generate_paths`] turns it into ray lists per link,
//! [`cfr_from_paths`] synthesises the frequency response of a link, and
//! [`ChannelSet`] bundles the direct (`H_los`), structural-mode (`H_sm`) and
//! antenna-mode (`H_am_r`, `H_am_t`) matrices for every subcarrier.
//! [`compose_channel`] adds the RIS contribution for a given Φ.

mod cfr;
mod geometry;
mod paths;

pub use cfr::{cfr_from_paths, compose_channel, compose_without_ris, ChannelSet, FrequencyGrid, SubcarrierChannel};
pub use geometry::{friis_gain, steering_vector, ArrayGeometry, Scatterer, ScenarioGeometry};
pub use paths::{generate_paths, LinkPaths, PathComponent};

/// 3-D point or direction, meters.
pub type Vec3 = nalgebra::Vector3<f64>;
