//! Scenario configuration.
//!
//! Every section rejects unknown keys. Only the fields without a default
//! have to be given: `geometry.n_tx`, `geometry.n_rx`, `ris.mode`,
//! `ris.k_ris`, `ris.levels` and `noise.sigma_z2`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::channel::{FrequencyGrid, Scatterer};
use crate::control::{default_rms_samples, CsmBudget, ObjectiveMetric};
use crate::link::{NoiseSpec, QamConstellation};
use crate::ris::{total_gain_db, AmplifierSpec, PhaseShifterSpec, RisArrayConfig, RisMode};
use crate::{Error, Result, SPEED_OF_LIGHT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_id")]
    pub id: String,
    pub geometry: GeometryConfig,
    pub ris: RisConfig,
    #[serde(default)]
    pub ofdm: FrequencyGrid,
    pub noise: NoiseConfig,
    #[serde(default)]
    pub link: LinkConfig,
    #[serde(default)]
    pub algorithm: AlgorithmConfig,
    #[serde(default)]
    pub seeds: SeedConfig,
    /// Cap on the summed linear transmission gain of all branches, dB.
    #[serde(default)]
    pub gain_budget_db: Option<f64>,
    #[serde(default)]
    pub codebook: CodebookConfig,
    #[serde(default)]
    pub map: Option<MapConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

fn default_id() -> String {
    "scenario".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub n_tx: usize,
    pub n_rx: usize,
    /// Centre of the Tx ULA. Default: bearing 150°, 2 m from the RIS
    /// horizontally and 0.3 m above it, clear of the codebook circle.
    #[serde(default = "GeometryConfig::default_tx")]
    pub tx_position: [f64; 3],
    /// Centre of the Rx ULA. Default: 1.5 m from the RIS at 30°.
    #[serde(default = "GeometryConfig::default_rx")]
    pub rx_position: [f64; 3],
    #[serde(default = "GeometryConfig::default_axis")]
    pub tx_axis: [f64; 3],
    #[serde(default = "GeometryConfig::default_axis")]
    pub rx_axis: [f64; 3],
    /// Tx/Rx antenna pitch, meters; half a wavelength when absent.
    #[serde(default)]
    pub antenna_spacing: Option<f64>,
    #[serde(default)]
    pub ris_position: [f64; 3],
    /// Boresight of the RIS plate; bearings are measured from the plate's
    /// horizontal axis towards this normal.
    #[serde(default = "GeometryConfig::default_normal")]
    pub ris_normal: [f64; 3],
    /// Columns of the RIS element grid; the most square factorisation of
    /// `k_ris` when absent.
    #[serde(default)]
    pub ris_cols: Option<usize>,
    #[serde(default)]
    pub los_blocked: bool,
    #[serde(default = "GeometryConfig::default_sm")]
    pub sm_gain_db: f64,
    #[serde(default)]
    pub scatterers: ScattererConfig,
}

impl GeometryConfig {
    fn default_tx() -> [f64; 3] {
        [-3f64.sqrt(), 1.0, 0.3]
    }
    fn default_rx() -> [f64; 3] {
        let t = 30f64.to_radians();
        [1.5 * t.cos(), 1.5 * t.sin(), 0.0]
    }
    fn default_axis() -> [f64; 3] {
        [0.0, 1.0, 0.0]
    }
    fn default_normal() -> [f64; 3] {
        [0.0, 1.0, 0.0]
    }
    fn default_sm() -> f64 {
        -10.0
    }
}

/// Point scatterers: `count` placed uniformly in the box
/// `[region_min, region_max]` per trial, plus the fixed `explicit` list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScattererConfig {
    #[serde(default = "ScattererConfig::default_count")]
    pub count: usize,
    #[serde(default = "ScattererConfig::default_reflection")]
    pub reflection_db: f64,
    #[serde(default = "ScattererConfig::default_min")]
    pub region_min: [f64; 3],
    #[serde(default = "ScattererConfig::default_max")]
    pub region_max: [f64; 3],
    #[serde(default)]
    pub explicit: Vec<Scatterer>,
}

impl ScattererConfig {
    fn default_count() -> usize {
        4
    }
    fn default_reflection() -> f64 {
        -10.0
    }
    fn default_min() -> [f64; 3] {
        [-4.0, 0.5, -1.5]
    }
    fn default_max() -> [f64; 3] {
        [4.0, 5.0, 1.5]
    }
}

impl Default for ScattererConfig {
    fn default() -> Self {
        Self {
            count: Self::default_count(),
            reflection_db: Self::default_reflection(),
            region_min: Self::default_min(),
            region_max: Self::default_max(),
            explicit: Vec::new(),
        }
    }
}

/// Flat view of [`RisArrayConfig`]. Passive arrays ignore the amplifier
/// and splitter fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RisConfig {
    pub mode: RisMode,
    pub k_ris: usize,
    pub levels: usize,
    #[serde(default = "one")]
    pub n_d: usize,
    /// LNA gain; 20 dB when absent.
    #[serde(default = "RisConfig::default_gain")]
    pub gain_db: f64,
    #[serde(default)]
    pub splitter_loss_db: f64,
    #[serde(default)]
    pub insertion_loss_db: f64,
    #[serde(default = "RisConfig::default_p_dps")]
    pub p_dps_mw: f64,
    #[serde(default = "RisConfig::default_p_ref")]
    pub p_ref_mw: f64,
    #[serde(default = "RisConfig::default_g_ref")]
    pub g_ref_db: f64,
    /// Element pitch, meters; half a wavelength when absent.
    #[serde(default)]
    pub element_spacing: Option<f64>,
}

fn one() -> usize {
    1
}

impl RisConfig {
    fn default_gain() -> f64 {
        20.0
    }
    fn default_p_dps() -> f64 {
        0.005
    }
    fn default_p_ref() -> f64 {
        300.0
    }
    fn default_g_ref() -> f64 {
        20.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub sigma_z2: f64,
    /// Amplifier noise per branch. Defaults to `sigma_z2` for active arrays
    /// and is forced to zero for passive ones.
    #[serde(default)]
    pub sigma_v2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkConfig {
    #[serde(default = "LinkConfig::default_qam")]
    pub qam_order: usize,
    /// Symbol vectors per subcarrier in the BER simulation.
    #[serde(default = "LinkConfig::default_frames")]
    pub n_frames: usize,
    /// Keep the plate's structural-mode reflection in the without-RIS
    /// baseline.
    #[serde(default = "yes")]
    pub include_sm_in_baseline: bool,
}

fn yes() -> bool {
    true
}

impl LinkConfig {
    fn default_qam() -> usize {
        16
    }
    fn default_frames() -> usize {
        64
    }
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            qam_order: Self::default_qam(),
            n_frames: Self::default_frames(),
            include_sm_in_baseline: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    Bg,
    Csm,
    Mpc,
    Exhaustive,
    /// No optimisation; the RIS keeps a random codeword.
    None,
}

impl AlgorithmKind {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmKind::Bg => "bg",
            AlgorithmKind::Csm => "csm",
            AlgorithmKind::Mpc => "mpc",
            AlgorithmKind::Exhaustive => "exhaustive",
            AlgorithmKind::None => "none",
        }
    }
}

impl std::fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bg" => AlgorithmKind::Bg,
            "csm" => AlgorithmKind::Csm,
            "mpc" => AlgorithmKind::Mpc,
            "exhaustive" => AlgorithmKind::Exhaustive,
            "none" => AlgorithmKind::None,
            _ => return Err(Error::invalid(format!("unknown algorithm {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    #[serde(default = "AlgorithmConfig::default_kind")]
    pub kind: AlgorithmKind,
    #[serde(default = "AlgorithmConfig::default_metric")]
    pub objective: ObjectiveMetric,
    /// RMS draws; `max(16, K)` when absent.
    #[serde(default)]
    pub r_samples: Option<usize>,
    #[serde(default)]
    pub csm_budget: CsmBudget,
    /// Codebook file for MPC.
    #[serde(default)]
    pub codebook: Option<PathBuf>,
    /// Largest codeword space the exhaustive search accepts.
    #[serde(default = "AlgorithmConfig::default_limit")]
    pub exhaustive_limit: u64,
}

impl AlgorithmConfig {
    fn default_kind() -> AlgorithmKind {
        AlgorithmKind::Bg
    }
    fn default_metric() -> ObjectiveMetric {
        ObjectiveMetric::Capacity
    }
    fn default_limit() -> u64 {
        1 << 16
    }
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        Self {
            kind: Self::default_kind(),
            objective: Self::default_metric(),
            r_samples: None,
            csm_budget: CsmBudget::default(),
            codebook: None,
            exhaustive_limit: Self::default_limit(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedConfig {
    #[serde(default = "SeedConfig::default_master")]
    pub master: u64,
    #[serde(default = "SeedConfig::default_trials")]
    pub trials: usize,
}

impl SeedConfig {
    fn default_master() -> u64 {
        1
    }
    fn default_trials() -> usize {
        20
    }
}

impl Default for SeedConfig {
    fn default() -> Self {
        Self {
            master: Self::default_master(),
            trials: Self::default_trials(),
        }
    }
}

/// SISO scenarios on which the MPC codebook is learned: the receiver sits
/// on a half circle of `radius` around the RIS, every `angle_step_deg`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodebookConfig {
    #[serde(default = "CodebookConfig::default_radius")]
    pub radius: f64,
    #[serde(default = "CodebookConfig::default_step")]
    pub angle_step_deg: f64,
    /// RMS draws per angle; `max(16, K)` when absent.
    #[serde(default)]
    pub r_samples: Option<usize>,
}

impl CodebookConfig {
    fn default_radius() -> f64 {
        2.0
    }
    fn default_step() -> f64 {
        5.0
    }

    /// `0, step, ..., 180` degrees.
    pub fn angles(&self) -> Vec<f64> {
        let n = (180.0 / self.angle_step_deg + 1e-9).floor() as usize;
        (0..=n).map(|i| i as f64 * self.angle_step_deg).collect()
    }
}

impl Default for CodebookConfig {
    fn default() -> Self {
        Self {
            radius: Self::default_radius(),
            angle_step_deg: Self::default_step(),
            r_samples: None,
        }
    }
}

/// Rectangular grid of Rx positions at height `z`, `nx` by `ny` points
/// spanning `x` and `y` inclusive. Point `(i, j)` has index `j * nx + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub x: [f64; 2],
    pub y: [f64; 2],
    #[serde(default)]
    pub z: f64,
    pub nx: usize,
    pub ny: usize,
}

impl MapConfig {
    pub fn positions(&self) -> Vec<[f64; 3]> {
        let lerp = |r: [f64; 2], i: usize, n: usize| {
            if n == 1 {
                0.5 * (r[0] + r[1])
            } else {
                r[0] + (r[1] - r[0]) * i as f64 / (n - 1) as f64
            }
        };
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for j in 0..self.ny {
            for i in 0..self.nx {
                out.push([lerp(self.x, i, self.nx), lerp(self.y, j, self.ny), self.z]);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    /// ICDF capacity increase and power per (array size, gain).
    GainSize,
    /// Probe count and ICDF capacity increase per (algorithm, array size).
    Efficiency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "SweepConfig::default_kind")]
    pub kind: SweepKind,
    /// Side lengths of square RIS arrays.
    #[serde(default = "SweepConfig::default_sizes")]
    pub sizes: Vec<usize>,
    /// Net per-branch transmission gains, dB.
    #[serde(default = "SweepConfig::default_gains")]
    pub gains_db: Vec<f64>,
    /// Add one passive cell per size.
    #[serde(default)]
    pub include_passive: bool,
    #[serde(default = "SweepConfig::default_algorithms")]
    pub algorithms: Vec<AlgorithmKind>,
    #[serde(default = "SweepConfig::default_level")]
    pub icdf_level: f64,
}

impl SweepConfig {
    fn default_kind() -> SweepKind {
        SweepKind::GainSize
    }
    fn default_sizes() -> Vec<usize> {
        vec![2, 4, 8, 16]
    }
    fn default_gains() -> Vec<f64> {
        vec![0.0, 6.0, 12.0, 18.0]
    }
    fn default_algorithms() -> Vec<AlgorithmKind> {
        vec![AlgorithmKind::Bg, AlgorithmKind::Csm, AlgorithmKind::Mpc]
    }
    fn default_level() -> f64 {
        super::DEFAULT_ICDF_LEVEL
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            kind: Self::default_kind(),
            sizes: Self::default_sizes(),
            gains_db: Self::default_gains(),
            include_passive: false,
            algorithms: Self::default_algorithms(),
            icdf_level: Self::default_level(),
        }
    }
}

fn finite3(name: &str, v: &[f64; 3]) -> Result<()> {
    if v.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be finite")))
    }
}

impl ScenarioConfig {
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.ofdm.center
    }

    pub fn antenna_spacing(&self) -> f64 {
        self.geometry.antenna_spacing.unwrap_or(0.5 * self.wavelength())
    }

    /// Amplifier noise after the passive/active default rule.
    pub fn sigma_v2(&self) -> f64 {
        match self.ris.mode {
            RisMode::Passive => 0.0,
            RisMode::Active => self.noise.sigma_v2.unwrap_or(self.noise.sigma_z2),
        }
    }

    pub fn noise_spec(&self) -> Result<NoiseSpec> {
        NoiseSpec::new(self.sigma_v2(), self.noise.sigma_z2)
    }

    pub fn array_config(&self) -> Result<RisArrayConfig> {
        let r = &self.ris;
        let spacing = r.element_spacing.unwrap_or(0.5 * self.wavelength());
        let cfg = match r.mode {
            RisMode::Active => RisArrayConfig {
                mode: RisMode::Active,
                k_ris: r.k_ris,
                n_d: r.n_d,
                splitter_loss_db: r.splitter_loss_db,
                shifter: PhaseShifterSpec::new(r.levels, r.insertion_loss_db)?,
                amp: AmplifierSpec {
                    gain_db: r.gain_db,
                    noise_var: self.sigma_v2(),
                    p_ref_mw: r.p_ref_mw,
                    g_ref_db: r.g_ref_db,
                },
                p_dps_mw: r.p_dps_mw,
                element_spacing: spacing,
            },
            RisMode::Passive => {
                let mut c = RisArrayConfig::ideal_passive(r.k_ris, r.levels, spacing);
                c.n_d = r.n_d;
                c.shifter.insertion_loss_db = r.insertion_loss_db;
                c.p_dps_mw = r.p_dps_mw;
                c
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn constellation(&self) -> Result<QamConstellation> {
        QamConstellation::new(self.link.qam_order)
    }

    /// Columns of the RIS grid.
    pub fn ris_cols(&self) -> usize {
        self.geometry.ris_cols.unwrap_or_else(|| {
            let k = self.ris.k_ris;
            (1..=k).rev().find(|c| k % c == 0 && c * c <= k).unwrap_or(1)
        })
    }

    pub fn r_samples(&self, cfg: &RisArrayConfig) -> usize {
        self.algorithm.r_samples.unwrap_or_else(|| default_rms_samples(cfg))
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        if g.n_tx == 0 || g.n_rx == 0 {
            return Err(Error::invalid("geometry.n_tx and geometry.n_rx must be >= 1"));
        }
        for (n, v) in [
            ("geometry.tx_position", &g.tx_position),
            ("geometry.rx_position", &g.rx_position),
            ("geometry.tx_axis", &g.tx_axis),
            ("geometry.rx_axis", &g.rx_axis),
            ("geometry.ris_position", &g.ris_position),
            ("geometry.ris_normal", &g.ris_normal),
        ] {
            finite3(n, v)?;
        }
        if !g.sm_gain_db.is_finite() {
            return Err(Error::invalid("geometry.sm_gain_db must be finite"));
        }
        if let Some(s) = g.antenna_spacing {
            if !(s > 0.0) {
                return Err(Error::invalid("geometry.antenna_spacing must be > 0"));
            }
        }
        let cols = self.ris_cols();
        if cols == 0 || self.ris.k_ris % cols != 0 {
            return Err(Error::invalid(format!(
                "geometry.ris_cols = {cols} does not divide ris.k_ris = {}",
                self.ris.k_ris
            )));
        }
        let s = &g.scatterers;
        if (0..3).any(|i| !(s.region_min[i] <= s.region_max[i])) {
            return Err(Error::invalid(
                "geometry.scatterers.region_min must not exceed region_max",
            ));
        }
        self.ofdm.validate()?;
        self.noise_spec()?;
        let cfg = self.array_config()?;
        self.constellation()?;
        if self.link.n_frames == 0 {
            return Err(Error::invalid("link.n_frames must be >= 1"));
        }
        if self.seeds.trials == 0 {
            return Err(Error::invalid("seeds.trials must be >= 1"));
        }
        if self.r_samples(&cfg) == 0 {
            return Err(Error::invalid("algorithm.r_samples must be >= 1"));
        }
        if let Some(b) = self.gain_budget_db {
            check_budget(&cfg, b)?;
        }
        let cb = &self.codebook;
        if !(cb.radius > 0.0) || !(cb.angle_step_deg > 0.0) || cb.angle_step_deg > 180.0 {
            return Err(Error::invalid(
                "codebook.radius must be > 0 and angle_step_deg in (0, 180]",
            ));
        }
        if let Some(m) = &self.map {
            if m.nx == 0 || m.ny == 0 {
                return Err(Error::invalid("map.nx and map.ny must be >= 1"));
            }
            if !(m.x.iter().chain(&m.y).all(|v| v.is_finite()) && m.z.is_finite()) {
                return Err(Error::invalid("map coordinates must be finite"));
            }
        }
        if let Some(sw) = &self.sweep {
            if sw.sizes.is_empty() || sw.sizes.contains(&0) {
                return Err(Error::invalid("sweep.sizes must be non-empty and >= 1"));
            }
            if sw.kind == SweepKind::GainSize && sw.gains_db.is_empty() && !sw.include_passive {
                return Err(Error::invalid("sweep.gains_db is empty"));
            }
            if sw.kind == SweepKind::Efficiency && sw.algorithms.is_empty() {
                return Err(Error::invalid("sweep.algorithms is empty"));
            }
            if !(sw.icdf_level > 0.0 && sw.icdf_level <= 1.0) {
                return Err(Error::invalid("sweep.icdf_level must be in (0, 1]"));
            }
        }
        Ok(())
    }
}

/// Fails when the summed transmission gain of `cfg` exceeds `budget_db`.
pub fn check_budget(cfg: &RisArrayConfig, budget_db: f64) -> Result<()> {
    let total = total_gain_db(cfg);
    if total > budget_db + 1e-9 {
        return Err(Error::invalid(format!(
            "summed transmission gain {total:.3} dB exceeds the {budget_db} dB budget"
        )));
    }
    Ok(())
}
