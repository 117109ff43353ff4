//! Active/passive RIS element chain.
//!
//! An active element receives on one rRIS antenna, amplifies (LNA), splits
//! into `n_d` branches and drives each tRIS antenna through its own digital
//! phase shifter. The per-branch transmission coefficient is the product of
//! the three stages; only the phase shifter is controllable.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{db_to_linear, Error, Result, C64};

/// Upper bound used by [`codeword_space_size`] when callers have no
/// specific limit of their own.
pub const DEFAULT_SPACE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RisMode {
    Active,
    Passive,
}

/// Discrete phase shifter with `levels` uniformly spaced states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseShifterSpec {
    pub levels: usize,
    pub insertion_loss_db: f64,
}

impl PhaseShifterSpec {
    pub fn new(levels: usize, insertion_loss_db: f64) -> Result<Self> {
        let spec = Self {
            levels,
            insertion_loss_db,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels < 2 || !self.levels.is_power_of_two() {
            return Err(Error::invalid(format!(
                "phase levels must be a power of two >= 2, got {}",
                self.levels
            )));
        }
        if !(self.insertion_loss_db >= 0.0) || !self.insertion_loss_db.is_finite() {
            return Err(Error::invalid(format!(
                "insertion loss must be a finite non-negative dB value, got {}",
                self.insertion_loss_db
            )));
        }
        Ok(())
    }

    /// Phase increment between adjacent states, radians.
    pub fn step(&self) -> f64 {
        2.0 * PI / self.levels as f64
    }
}

/// Low-noise amplifier in front of the splitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplifierSpec {
    pub gain_db: f64,
    /// Noise power per tRIS branch, linear.
    pub noise_var: f64,
    /// Static power draw at `g_ref_db`.
    pub p_ref_mw: f64,
    pub g_ref_db: f64,
}

impl AmplifierSpec {
    /// The 20 dB / 300 mW LNA of the hardware prototype.
    pub fn hardware_lna(noise_var: f64) -> Self {
        Self {
            gain_db: 20.0,
            noise_var,
            p_ref_mw: 300.0,
            g_ref_db: 20.0,
        }
    }

    /// A placeholder amplifier for passive arrays: unity gain, no noise.
    pub fn none() -> Self {
        Self {
            gain_db: 0.0,
            noise_var: 0.0,
            p_ref_mw: 300.0,
            g_ref_db: 20.0,
        }
    }
}

/// Static power of one LNA operated at `gain_db`, scaled from the
/// reference point as `p_ref * 10^((g - g_ref)/10)`.
pub fn lna_power_mw(amp: &AmplifierSpec, gain_db: f64) -> f64 {
    amp.p_ref_mw * db_to_linear(gain_db - amp.g_ref_db)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RisArrayConfig {
    pub mode: RisMode,
    /// Number of rRIS elements.
    pub k_ris: usize,
    /// tRIS branches per element.
    pub n_d: usize,
    pub splitter_loss_db: f64,
    pub shifter: PhaseShifterSpec,
    pub amp: AmplifierSpec,
    pub p_dps_mw: f64,
    /// Element pitch, meters.
    pub element_spacing: f64,
}

impl RisArrayConfig {
    /// Active array built from the prototype parts: 20 dB LNA, 9 dB
    /// 8-way splitter loss, 16-level shifter with 3 dB loss and 5 uW draw.
    pub fn hardware_active(k_ris: usize, n_d: usize, element_spacing: f64) -> Self {
        Self {
            mode: RisMode::Active,
            k_ris,
            n_d,
            splitter_loss_db: 9.0,
            shifter: PhaseShifterSpec {
                levels: 16,
                insertion_loss_db: 3.0,
            },
            amp: AmplifierSpec::hardware_lna(0.0),
            p_dps_mw: 0.005,
            element_spacing,
        }
    }

    /// Lossless passive reflector with `levels` phase states.
    pub fn ideal_passive(k_ris: usize, levels: usize, element_spacing: f64) -> Self {
        Self {
            mode: RisMode::Passive,
            k_ris,
            n_d: 1,
            splitter_loss_db: 0.0,
            shifter: PhaseShifterSpec {
                levels,
                insertion_loss_db: 0.0,
            },
            amp: AmplifierSpec::none(),
            p_dps_mw: 0.005,
            element_spacing,
        }
    }

    /// Active array with an ideal shifter and no splitter, so the element
    /// gain equals the amplifier gain. Used by simulation sweeps.
    pub fn ideal_active(k_ris: usize, levels: usize, gain_db: f64, noise_var: f64, element_spacing: f64) -> Self {
        Self {
            mode: RisMode::Active,
            k_ris,
            n_d: 1,
            splitter_loss_db: 0.0,
            shifter: PhaseShifterSpec {
                levels,
                insertion_loss_db: 0.0,
            },
            amp: AmplifierSpec {
                gain_db,
                noise_var,
                p_ref_mw: 300.0,
                g_ref_db: 20.0,
            },
            p_dps_mw: 0.005,
            element_spacing,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.shifter.validate()?;
        if self.k_ris == 0 || self.n_d == 0 {
            return Err(Error::invalid(format!(
                "k_ris and n_d must be >= 1, got k_ris={} n_d={}",
                self.k_ris, self.n_d
            )));
        }
        if !(self.amp.noise_var >= 0.0) {
            return Err(Error::invalid("amplifier noise_var must be >= 0"));
        }
        if !(self.amp.p_ref_mw > 0.0) {
            return Err(Error::invalid("amplifier p_ref_mw must be > 0"));
        }
        if !(self.p_dps_mw >= 0.0) {
            return Err(Error::invalid("p_dps_mw must be >= 0"));
        }
        if !self.splitter_loss_db.is_finite() || !self.amp.gain_db.is_finite() {
            return Err(Error::invalid("gains and losses must be finite"));
        }
        if !(self.element_spacing > 0.0) {
            return Err(Error::invalid("element_spacing must be > 0"));
        }
        if self.mode == RisMode::Passive {
            if self.n_d != 1 {
                return Err(Error::invalid("passive arrays have n_d = 1"));
            }
            if self.amp.noise_var != 0.0 {
                return Err(Error::invalid("passive arrays carry no amplifier noise"));
            }
        }
        Ok(())
    }

    /// Number of controllable coefficients, `k_ris * n_d`.
    pub fn k(&self) -> usize {
        self.k_ris * self.n_d
    }

    pub fn levels(&self) -> usize {
        self.shifter.levels
    }

    /// Net per-branch gain in dB (power).
    pub fn net_gain_db(&self) -> f64 {
        match self.mode {
            RisMode::Active => self.amp.gain_db - self.splitter_loss_db - self.shifter.insertion_loss_db,
            RisMode::Passive => -self.shifter.insertion_loss_db,
        }
    }

    /// |Φ^k|, identical for every branch and phase state.
    pub fn coefficient_magnitude(&self) -> f64 {
        10f64.powf(self.net_gain_db() / 20.0)
    }

    /// Amplifier noise power per branch; zero for passive arrays.
    pub fn noise_var(&self) -> f64 {
        match self.mode {
            RisMode::Active => self.amp.noise_var,
            RisMode::Passive => 0.0,
        }
    }
}

/// One phase index per controllable coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PhaseCodeword(Vec<usize>);

impl PhaseCodeword {
    pub fn new(indices: Vec<usize>) -> Self {
        Self(indices)
    }

    /// Checked constructor against a given array.
    pub fn for_config(indices: Vec<usize>, cfg: &RisArrayConfig) -> Result<Self> {
        let cw = Self(indices);
        cw.validate(cfg)?;
        Ok(cw)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn validate(&self, cfg: &RisArrayConfig) -> Result<()> {
        if self.0.len() != cfg.k() {
            return Err(Error::invalid(format!(
                "codeword length {} does not match K = {}",
                self.0.len(),
                cfg.k()
            )));
        }
        let m = cfg.levels();
        if let Some(&bad) = self.0.iter().find(|&&i| i >= m) {
            return Err(Error::invalid(format!("phase index {bad} out of range for M = {m}")));
        }
        Ok(())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn with(&self, position: usize, index: usize) -> Self {
        let mut v = self.0.clone();
        v[position] = index;
        Self(v)
    }

    pub fn set(&mut self, position: usize, index: usize) {
        self.0[position] = index;
    }
}

impl std::fmt::Display for PhaseCodeword {
    /// Space-separated indices.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for PhaseCodeword {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|e| Error::invalid(format!("bad phase index {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

/// Diagonal of the transmission matrix Φ.
#[derive(Debug, Clone, PartialEq)]
pub struct Phi(Vec<C64>);

impl Phi {
    pub fn from_diagonal(diag: Vec<C64>) -> Self {
        Self(diag)
    }

    pub fn zeros(k: usize) -> Self {
        Self(vec![C64::new(0.0, 0.0); k])
    }

    pub fn diagonal(&self) -> &[C64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_matrix(&self) -> nalgebra::DMatrix<C64> {
        nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.0))
    }
}

/// Transmission coefficient of one branch set to phase state `index`.
pub fn element_coefficient(index: usize, cfg: &RisArrayConfig) -> Result<C64> {
    let m = cfg.levels();
    if index >= m {
        return Err(Error::invalid(format!("phase index {index} out of range for M = {m}")));
    }
    Ok(C64::from_polar(
        cfg.coefficient_magnitude(),
        index as f64 * cfg.shifter.step(),
    ))
}

/// Φ = diag(Φ¹, …, Φ^K) for a codeword.
pub fn build_phi(codeword: &PhaseCodeword, cfg: &RisArrayConfig) -> Result<Phi> {
    codeword.validate(cfg)?;
    // one table lookup per level instead of a polar conversion per element
    let table: Vec<C64> = (0..cfg.levels())
        .map(|m| element_coefficient(m, cfg))
        .collect::<Result<_>>()?;
    Ok(Phi(codeword.indices().iter().map(|&i| table[i]).collect()))
}

/// Total static power of the array, mW: `k_ris * P_lna(gain) + K * P_dps`
/// for active arrays, `K * P_dps` for passive ones.
pub fn power_consumption(cfg: &RisArrayConfig) -> f64 {
    let dps = cfg.k() as f64 * cfg.p_dps_mw;
    match cfg.mode {
        RisMode::Passive => dps,
        RisMode::Active => cfg.k_ris as f64 * lna_power_mw(&cfg.amp, cfg.amp.gain_db) + dps,
    }
}

/// Size of the exhaustive codeword space, or `None` when `M^K` exceeds
/// `limit`.
pub fn codeword_space_size(cfg: &RisArrayConfig, limit: u64) -> Option<u64> {
    let m = cfg.levels() as u64;
    let mut size: u64 = 1;
    for _ in 0..cfg.k() {
        size = size.checked_mul(m)?;
        if size > limit {
            return None;
        }
    }
    Some(size)
}

/// Uniform random codeword.
pub fn random_codeword<R: Rng + ?Sized>(cfg: &RisArrayConfig, rng: &mut R) -> PhaseCodeword {
    let m = cfg.levels();
    PhaseCodeword((0..cfg.k()).map(|_| rng.random_range(0..m)).collect())
}

/// Per-element gain that keeps the summed linear transmission gain of `k`
/// coefficients at `budget_db`.
pub fn gain_for_budget(budget_db: f64, k: usize) -> f64 {
    budget_db - 10.0 * (k as f64).log10()
}

/// Summed linear transmission gain of the array, in dB.
pub fn total_gain_db(cfg: &RisArrayConfig) -> f64 {
    cfg.net_gain_db() + 10.0 * (cfg.k() as f64).log10()
}
