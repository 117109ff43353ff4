//! Maximum-power codebook: direction beams learned offline on SISO links,
//! then selected online by probing each once.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::bg::bg;
use super::objective::{ChannelObjective, ObjectiveMetric};
use super::oracle::{OptimizationResult, ProbeOracle};
use crate::channel::ChannelSet;
use crate::link::NoiseSpec;
use crate::ris::{PhaseCodeword, RisArrayConfig};
use crate::seed::{derive_rng, stream};
use crate::{par, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookEntry {
    pub angle_deg: f64,
    pub codeword: PhaseCodeword,
}

/// Entries sorted by strictly increasing angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McpCodebook {
    entries: Vec<CodebookEntry>,
}

/// 0°, 5°, ..., 180°.
pub fn default_angles() -> Vec<f64> {
    (0..=36).map(|i| i as f64 * 5.0).collect()
}

impl McpCodebook {
    pub fn new(entries: Vec<CodebookEntry>) -> Result<Self> {
        if entries.iter().any(|e| !e.angle_deg.is_finite()) {
            return Err(Error::invalid("codebook angles must be finite"));
        }
        if entries.windows(2).any(|w| !(w[1].angle_deg > w[0].angle_deg)) {
            return Err(Error::invalid("codebook angles must be strictly increasing"));
        }
        if entries.windows(2).any(|w| w[1].codeword.len() != w[0].codeword.len()) {
            return Err(Error::invalid("codebook codewords differ in length"));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[CodebookEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn validate_for(&self, cfg: &RisArrayConfig) -> Result<()> {
        self.entries.iter().try_for_each(|e| e.codeword.validate(cfg))
    }

    /// One `angle,idx idx ...` line per entry.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        for e in &self.entries {
            writeln!(w, "{},{}", e.angle_deg, e.codeword)?;
        }
        Ok(())
    }

    /// Parses the [`write_text`](Self::write_text) format; blank lines and
    /// lines starting with `#` are skipped.
    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut entries = Vec::new();
        for (n, line) in r.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: n + 1, msg };
            let (a, c) = t
                .split_once(',')
                .ok_or_else(|| perr("expected angle,codeword".into()))?;
            entries.push(CodebookEntry {
                angle_deg: a.trim().parse().map_err(|e| perr(format!("bad angle: {e}")))?,
                codeword: c.parse().map_err(|e| perr(format!("{e}")))?,
            });
        }
        Self::new(entries)
    }
}

/// Builds the codebook: for every angle, `factory(angle)` yields a SISO
/// channel with the receiver on that bearing, and BG with the SNR objective
/// picks the entry. Angles are processed independently with seeds derived
/// from `seed` and the angle index.
pub fn mpc_build_codebook<F>(
    factory: F,
    angles: &[f64],
    cfg: &RisArrayConfig,
    noise: &NoiseSpec,
    r_samples: usize,
    seed: u64,
) -> Result<McpCodebook>
where
    F: Fn(f64) -> Result<ChannelSet> + Sync,
{
    cfg.validate()?;
    let entries = par::try_map_range(angles.len(), |i| {
        let cs = factory(angles[i])?;
        if cs.n_t() != 1 || cs.n_r() != 1 {
            return Err(Error::invalid(format!(
                "codebook scenarios must be SISO, got {}T{}R",
                cs.n_t(),
                cs.n_r()
            )));
        }
        let obj = ChannelObjective::new(&cs, cfg, noise, ObjectiveMetric::Snr)?;
        let mut oracle = ProbeOracle::new(&obj, cfg.k(), cfg.levels());
        let mut rng = derive_rng(seed, &[stream::CODEBOOK, i as u64]);
        let res = bg(&mut oracle, r_samples, cfg, &mut rng)?;
        Ok(CodebookEntry {
            angle_deg: angles[i],
            codeword: res.best_codeword,
        })
    })?;
    McpCodebook::new(entries)
}

/// Probes every entry once, in angle order.
pub fn mpc_select(oracle: &mut ProbeOracle<'_>, codebook: &McpCodebook) -> Result<OptimizationResult> {
    if codebook.is_empty() {
        return Err(Error::invalid("MPC codebook is empty"));
    }
    for e in codebook.entries() {
        oracle.evaluate(&e.codeword);
    }
    OptimizationResult::from_trace(oracle.trace().to_vec())
}
