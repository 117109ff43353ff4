//! Test-area studies: capacity-increase maps, gain/size sweeps and
//! algorithm efficiency.
//!
//! A sample is one `(receiver position, trial)` pair. Samples are
//! independent work units with seeds derived from the master seed and their
//! indices, so every statistic is independent of the schedule.

use serde::{Deserialize, Serialize};

use super::config::{check_budget, AlgorithmKind, ScenarioConfig};
use super::record::ResultRecord;
use super::scenario::build_scenario;
use super::stats::{icdf, mean, IcdfStat};
use super::study::{baseline_capacity, build_codebook, measure_codeword, optimize};
use crate::control::McpCodebook;
use crate::link::LinkMetrics;
use crate::ris::{power_consumption, RisArrayConfig, RisMode};
use crate::seed::{derive, stream};
use crate::{par, Error, Result};

/// Outcome at one receiver position of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub position_index: usize,
    pub position: [f64; 3],
    pub trial: usize,
    pub baseline_capacity: f64,
    pub optimized: LinkMetrics,
    /// `optimized.capacity - baseline_capacity`.
    pub delta_c: f64,
    pub probes: usize,
}

/// Receiver positions of the test area: the map grid when configured, the
/// configured receiver position otherwise.
pub fn area_positions(cfg: &ScenarioConfig) -> Vec<[f64; 3]> {
    match &cfg.map {
        Some(m) => m.positions(),
        None => vec![cfg.geometry.rx_position],
    }
}

/// Optimises with `kind` at one position of one trial and measures the
/// result against the without-RIS baseline.
pub fn evaluate_sample(
    cfg: &ScenarioConfig,
    ris: &RisArrayConfig,
    kind: AlgorithmKind,
    codebook: Option<&McpCodebook>,
    position_index: usize,
    position: [f64; 3],
    trial: usize,
) -> Result<SampleOutcome> {
    let scenario = build_scenario(cfg, ris, Some(position), trial)?;
    let coords = [position_index as u64, trial as u64];
    let alg_seed = derive(cfg.seeds.master, &[stream::ALGORITHM, coords[0], coords[1]]);
    let link_seed = derive(cfg.seeds.master, &[stream::LINK, coords[0], coords[1]]);
    let result = optimize(cfg, &scenario, kind, codebook, alg_seed)?;
    let optimized = measure_codeword(cfg, &scenario, &result.best_codeword, link_seed)?;
    let baseline = baseline_capacity(cfg, &scenario)?;
    Ok(SampleOutcome {
        position_index,
        position,
        trial,
        baseline_capacity: baseline,
        optimized,
        delta_c: optimized.capacity - baseline,
        probes: result.probe_count,
    })
}

/// Every `(position, trial)` sample of the test area, position-major.
pub fn evaluate_area(
    cfg: &ScenarioConfig,
    ris: &RisArrayConfig,
    kind: AlgorithmKind,
    codebook: Option<&McpCodebook>,
) -> Result<Vec<SampleOutcome>> {
    let positions = area_positions(cfg);
    let trials = cfg.seeds.trials;
    par::try_map_range(positions.len() * trials, |i| {
        let (p, t) = (i / trials, i % trials);
        evaluate_sample(cfg, ris, kind, codebook, p, positions[p], t)
    })
}

/// Capacity increase at each position of `positions`, all in the
/// environment of trial `trial`.
pub fn capacity_increase_map(
    cfg: &ScenarioConfig,
    positions: &[[f64; 3]],
    trial: usize,
    codebook: Option<&McpCodebook>,
) -> Result<Vec<SampleOutcome>> {
    if positions.is_empty() {
        return Err(Error::invalid("map grid is empty"));
    }
    cfg.validate()?;
    let ris = cfg.array_config()?;
    par::try_map_range(positions.len(), |p| {
        evaluate_sample(cfg, &ris, cfg.algorithm.kind, codebook, p, positions[p], trial)
    })
}

/// Map record: the [`ResultRecord`] columns followed by `x,y,z`.
pub const MAP_HEADER: &str = "scenario_id,seed,algorithm,probes,capacity,snr_db,ber,delta_c,power_mw,x,y,z";

pub fn map_line(cfg: &ScenarioConfig, ris: &RisArrayConfig, s: &SampleOutcome) -> String {
    let r = ResultRecord {
        scenario_id: format!("{}/p{}", cfg.id, s.position_index),
        seed: cfg.seeds.master,
        algorithm: cfg.algorithm.kind.to_string(),
        probes: s.probes,
        capacity: s.optimized.capacity,
        snr_db: s.optimized.snr_db,
        ber: s.optimized.uncoded_ber,
        delta_c: s.delta_c,
        power_mw: power_consumption(ris),
    };
    format!("{},{},{},{}", r.to_line(), s.position[0], s.position[1], s.position[2])
}

/// Array of `side × side` elements derived from the configured one.
///
/// Active cells get net per-branch transmission gain `gain_db`: the
/// amplifier gain is raised by the configured splitter and insertion
/// losses. Passive cells keep the configured shifter and carry no
/// amplifier noise.
pub fn cell_array(cfg: &ScenarioConfig, side: usize, mode: RisMode, gain_db: f64) -> Result<RisArrayConfig> {
    let mut c = cfg.clone();
    c.ris.k_ris = side * side;
    c.ris.mode = mode;
    if mode == RisMode::Passive {
        c.ris.n_d = 1;
    }
    c.ris.gain_db = gain_db + c.ris.splitter_loss_db + c.ris.insertion_loss_db;
    c.array_config()
}

fn cell_config(cfg: &ScenarioConfig, side: usize) -> ScenarioConfig {
    let mut c = cfg.clone();
    c.ris.k_ris = side * side;
    c.geometry.ris_cols = Some(side);
    c
}

/// One (size, mode, gain) cell of the gain/size study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub side: usize,
    pub mode: RisMode,
    /// Net per-branch gain; 0 for passive cells.
    pub gain_db: f64,
    pub power_mw: f64,
    pub delta_c: IcdfStat,
    pub samples: Vec<SampleOutcome>,
}

impl SweepCell {
    pub fn label(&self) -> String {
        match self.mode {
            RisMode::Active => format!("{0}x{0}/active/{1}dB", self.side, self.gain_db),
            RisMode::Passive => format!("{0}x{0}/passive", self.side),
        }
    }

    pub fn record(&self, cfg: &ScenarioConfig, algorithm: AlgorithmKind) -> ResultRecord {
        let col = |f: fn(&SampleOutcome) -> f64| mean(&self.samples.iter().map(f).collect::<Vec<_>>());
        ResultRecord {
            scenario_id: format!("{}/{}", cfg.id, self.label()),
            seed: cfg.seeds.master,
            algorithm: algorithm.to_string(),
            probes: self.samples[0].probes,
            capacity: col(|s| s.optimized.capacity),
            snr_db: col(|s| s.optimized.snr_db),
            ber: col(|s| s.optimized.uncoded_ber),
            delta_c: self.delta_c.value,
            power_mw: self.power_mw,
        }
    }
}

/// Evaluates the test area for each `(side, mode, gain)` cell with the
/// configured algorithm; the cell statistic is the ICDF of ΔC over all
/// samples at `level`. MPC cells learn their own codebook.
pub fn sweep_cells(cfg: &ScenarioConfig, cells: &[(usize, RisMode, f64)], level: f64) -> Result<Vec<SweepCell>> {
    cfg.validate()?;
    cells
        .iter()
        .map(|&(side, mode, gain)| {
            let c = cell_config(cfg, side);
            let ris = cell_array(&c, side, mode, if mode == RisMode::Passive { 0.0 } else { gain })?;
            if let Some(b) = cfg.gain_budget_db {
                check_budget(&ris, b)?;
            }
            let cb = match cfg.algorithm.kind {
                AlgorithmKind::Mpc => Some(build_codebook(&c, &ris)?),
                _ => None,
            };
            let samples = evaluate_area(&c, &ris, cfg.algorithm.kind, cb.as_ref())?;
            let dc: Vec<f64> = samples.iter().map(|s| s.delta_c).collect();
            Ok(SweepCell {
                side,
                mode,
                gain_db: if mode == RisMode::Passive { 0.0 } else { gain },
                power_mw: power_consumption(&ris),
                delta_c: icdf(&dc, level)?,
                samples,
            })
        })
        .collect()
}

/// Every `size × gain` active cell, then one passive cell per size when
/// `include_passive` is set.
pub fn gain_size_sweep(
    cfg: &ScenarioConfig,
    sizes: &[usize],
    gains_db: &[f64],
    include_passive: bool,
    level: f64,
) -> Result<Vec<SweepCell>> {
    let mut cells: Vec<(usize, RisMode, f64)> = sizes
        .iter()
        .flat_map(|&s| gains_db.iter().map(move |&g| (s, RisMode::Active, g)))
        .collect();
    if include_passive {
        cells.extend(sizes.iter().map(|&s| (s, RisMode::Passive, 0.0)));
    }
    sweep_cells(cfg, &cells, level)
}

/// Probe cost and capacity increase of one algorithm at one array size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyPoint {
    pub algorithm: AlgorithmKind,
    pub side: usize,
    pub probes: usize,
    pub log4_probes: f64,
    pub delta_c: IcdfStat,
    pub power_mw: f64,
    pub samples: Vec<SampleOutcome>,
}

impl EfficiencyPoint {
    pub fn record(&self, cfg: &ScenarioConfig) -> ResultRecord {
        let col = |f: fn(&SampleOutcome) -> f64| mean(&self.samples.iter().map(f).collect::<Vec<_>>());
        ResultRecord {
            scenario_id: format!("{0}/{1}x{1}", cfg.id, self.side),
            seed: cfg.seeds.master,
            algorithm: self.algorithm.to_string(),
            probes: self.probes,
            capacity: col(|s| s.optimized.capacity),
            snr_db: col(|s| s.optimized.snr_db),
            ber: col(|s| s.optimized.uncoded_ber),
            delta_c: self.delta_c.value,
            power_mw: self.power_mw,
        }
    }
}

/// Runs each algorithm on identical channel realisations for each square
/// array size, keeping the configured mode and gain. MPC learns a codebook
/// per size.
pub fn algorithm_efficiency(
    cfg: &ScenarioConfig,
    algorithms: &[AlgorithmKind],
    sizes: &[usize],
    level: f64,
) -> Result<Vec<EfficiencyPoint>> {
    cfg.validate()?;
    let mut out = Vec::with_capacity(algorithms.len() * sizes.len());
    for &side in sizes {
        let c = cell_config(cfg, side);
        let ris = c.array_config()?;
        let cb = if algorithms.contains(&AlgorithmKind::Mpc) {
            Some(build_codebook(&c, &ris)?)
        } else {
            None
        };
        for &alg in algorithms {
            let samples = evaluate_area(&c, &ris, alg, cb.as_ref())?;
            let dc: Vec<f64> = samples.iter().map(|s| s.delta_c).collect();
            let probes = samples[0].probes;
            out.push(EfficiencyPoint {
                algorithm: alg,
                side,
                probes,
                log4_probes: (probes as f64).ln() / 4f64.ln(),
                delta_c: icdf(&dc, level)?,
                power_mw: power_consumption(&ris),
                samples,
            });
        }
    }
    Ok(out)
}
