use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::oracle::Objective;
use crate::channel::{compose_channel, ChannelSet};
use crate::link::{capacity, inv_sqrt_hermitian, noise_covariance, snr, NoiseSpec, RisState};
use crate::ris::{build_phi, PhaseCodeword, RisArrayConfig};
use crate::{par, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveMetric {
    /// Subcarrier-mean whitened capacity, bps/Hz.
    Capacity,
    /// Subcarrier-mean whitened SNR, linear.
    Snr,
}

/// Channel-backed objective: the mean over subcarriers of capacity or SNR
/// of the whitened channel for a codeword.
///
/// Φ has constant modulus, so `R_n` does not depend on the codeword; its
/// inverse square root is computed once per subcarrier at construction.
pub struct ChannelObjective<'a> {
    cs: &'a ChannelSet,
    cfg: &'a RisArrayConfig,
    metric: ObjectiveMetric,
    whiteners: Vec<DMatrix<C64>>,
}

impl<'a> ChannelObjective<'a> {
    pub fn new(
        cs: &'a ChannelSet,
        cfg: &'a RisArrayConfig,
        noise: &NoiseSpec,
        metric: ObjectiveMetric,
    ) -> Result<Self> {
        if cs.k() != cfg.k() || cs.k_ris() != cfg.k_ris {
            return Err(Error::invalid(format!(
                "channel set has K_ris={} K={} but the array has K_ris={} K={}",
                cs.k_ris(),
                cs.k(),
                cfg.k_ris,
                cfg.k()
            )));
        }
        noise.validate()?;
        let phi = build_phi(&PhaseCodeword::zeros(cfg.k()), cfg)?;
        let state = RisState::Configured(phi);
        let whiteners = par::try_map_range(cs.n_sc(), |sc| {
            inv_sqrt_hermitian(&noise_covariance(cs, &state, noise, sc)?)
        })?;
        Ok(Self {
            cs,
            cfg,
            metric,
            whiteners,
        })
    }

    pub fn metric(&self) -> ObjectiveMetric {
        self.metric
    }
}

impl Objective for ChannelObjective<'_> {
    fn value(&self, codeword: &PhaseCodeword) -> f64 {
        let phi = build_phi(codeword, self.cfg).expect("oracle validated the codeword");
        let per_sc = par::map_range(self.cs.n_sc(), |sc| {
            let h = compose_channel(self.cs, &phi, sc).expect("dimensions validated at construction");
            let ht = &self.whiteners[sc] * h;
            match self.metric {
                ObjectiveMetric::Capacity => capacity(&ht),
                ObjectiveMetric::Snr => snr(&ht),
            }
        });
        per_sc.iter().sum::<f64>() / per_sc.len() as f64
    }
}
