//! Single-scenario optimisation and the state table.

use serde::{Deserialize, Serialize};

use super::config::{AlgorithmKind, ScenarioConfig};
use super::record::ResultRecord;
use super::scenario::{build_scenario, codebook_channel, noise_for, Scenario};
use crate::control::{
    bg, csm, exhaustive, mpc_build_codebook, mpc_select, ChannelObjective, McpCodebook, Objective, OptimizationResult,
    ProbeOracle,
};
use crate::link::{measure_link, subcarrier_metrics, LinkMetrics, RisState};
use crate::ris::{build_phi, power_consumption, random_codeword, PhaseCodeword, RisArrayConfig};
use crate::seed::{derive, rng_from_seed, stream};
use crate::{par, Error, Result};

/// Runs `kind` on one channel realisation through a probe oracle.
///
/// `seed` drives every random draw of the algorithm. MPC needs `codebook`;
/// `None` probes a single random codeword.
pub fn optimize(
    cfg: &ScenarioConfig,
    scenario: &Scenario,
    kind: AlgorithmKind,
    codebook: Option<&McpCodebook>,
    seed: u64,
) -> Result<OptimizationResult> {
    let ris = &scenario.ris;
    let obj = ChannelObjective::new(&scenario.channels, ris, &scenario.noise, cfg.algorithm.objective)?;
    let mut oracle = ProbeOracle::new(&obj, ris.k(), ris.levels());
    let mut rng = rng_from_seed(seed);
    match kind {
        AlgorithmKind::Bg => bg(&mut oracle, cfg.r_samples(ris), ris, &mut rng),
        AlgorithmKind::Csm => csm(&mut oracle, ris, &mut rng, cfg.algorithm.csm_budget.samples(ris)),
        AlgorithmKind::Mpc => {
            let cb = codebook.ok_or_else(|| {
                Error::invalid(
                    "MPC needs a codebook; generate one with the `codebook` command and pass it with --codebook",
                )
            })?;
            cb.validate_for(ris)?;
            mpc_select(&mut oracle, cb)
        }
        AlgorithmKind::Exhaustive => exhaustive(&mut oracle, ris, cfg.algorithm.exhaustive_limit),
        AlgorithmKind::None => {
            oracle.evaluate(&random_codeword(ris, &mut rng));
            OptimizationResult::from_trace(oracle.into_trace())
        }
    }
}

/// Learns the MPC codebook for array `ris` on the configured half circle.
pub fn build_codebook(cfg: &ScenarioConfig, ris: &RisArrayConfig) -> Result<McpCodebook> {
    let noise = noise_for(cfg, ris)?;
    let r = cfg
        .codebook
        .r_samples
        .unwrap_or_else(|| crate::control::default_rms_samples(ris));
    mpc_build_codebook(
        |a| codebook_channel(cfg, ris, a),
        &cfg.codebook.angles(),
        ris,
        &noise,
        r,
        derive(cfg.seeds.master, &[stream::CODEBOOK]),
    )
}

/// Subcarrier-mean capacity without the RIS.
pub fn baseline_capacity(cfg: &ScenarioConfig, scenario: &Scenario) -> Result<f64> {
    let state = RisState::Absent {
        include_sm: cfg.link.include_sm_in_baseline,
    };
    let cs = &scenario.channels;
    let caps = par::try_map_range(cs.n_sc(), |sc| {
        subcarrier_metrics(cs, &state, &scenario.noise, sc).map(|m| m.0)
    })?;
    Ok(caps.iter().sum::<f64>() / caps.len() as f64)
}

/// Link metrics with the RIS set to `codeword`.
pub fn measure_codeword(
    cfg: &ScenarioConfig,
    scenario: &Scenario,
    codeword: &PhaseCodeword,
    seed: u64,
) -> Result<LinkMetrics> {
    let phi = build_phi(codeword, &scenario.ris)?;
    measure_link(
        &scenario.channels,
        &RisState::Configured(phi),
        &scenario.noise,
        &cfg.constellation()?,
        cfg.link.n_frames,
        seed,
    )
}

/// Table rows of one optimisation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateReport {
    pub scenario_id: String,
    pub trial: usize,
    pub algorithm: AlgorithmKind,
    pub without_ris: LinkMetrics,
    /// First probed codeword.
    pub initial: LinkMetrics,
    /// Best probed codeword.
    pub best: LinkMetrics,
    /// Worst probed codeword.
    pub worst: LinkMetrics,
    /// Control range: `best - worst` for capacity and SNR, `worst - best`
    /// for BER, so improvements are positive. Only the capacity entry is
    /// guaranteed non-negative, as it is the optimised objective.
    pub diff: LinkMetrics,
    pub power_mw: f64,
    pub result: OptimizationResult,
}

impl StateReport {
    pub fn delta_c(&self) -> f64 {
        self.best.capacity - self.without_ris.capacity
    }

    /// Rows `without_ris`, `initial`, `best`, `worst`, `diff` as
    /// `state,snr_db,capacity,uncoded_ber` lines under a header.
    pub fn to_table(&self) -> String {
        let mut s = String::from("state,snr_db,capacity,uncoded_ber\n");
        for (name, m) in [
            ("without_ris", &self.without_ris),
            ("initial", &self.initial),
            ("best", &self.best),
            ("worst", &self.worst),
            ("diff", &self.diff),
        ] {
            s.push_str(&format!("{name},{},{},{}\n", m.snr_db, m.capacity, m.uncoded_ber));
        }
        s
    }

    pub fn record(&self, seed: u64) -> ResultRecord {
        ResultRecord {
            scenario_id: format!("{}/t{}", self.scenario_id, self.trial),
            seed,
            algorithm: self.algorithm.to_string(),
            probes: self.result.probe_count,
            capacity: self.best.capacity,
            snr_db: self.best.snr_db,
            ber: self.best.uncoded_ber,
            delta_c: self.delta_c(),
            power_mw: self.power_mw,
        }
    }
}

/// Optimises trial `trial` of the configured scenario with the configured
/// algorithm and measures the without-RIS, initial, best and worst states.
///
/// All BER simulations of the trial share one link seed, so the states are
/// compared on identical symbols and noise.
pub fn run_state_study(cfg: &ScenarioConfig, trial: usize, codebook: Option<&McpCodebook>) -> Result<StateReport> {
    let ris = cfg.array_config()?;
    let scenario = build_scenario(cfg, &ris, None, trial)?;
    let master = cfg.seeds.master;
    let t = trial as u64;
    let result = optimize(
        cfg,
        &scenario,
        cfg.algorithm.kind,
        codebook,
        derive(master, &[stream::ALGORITHM, 0, t]),
    )?;
    let link_seed = derive(master, &[stream::LINK, 0, t]);
    let without_ris = measure_link(
        &scenario.channels,
        &RisState::Absent {
            include_sm: cfg.link.include_sm_in_baseline,
        },
        &scenario.noise,
        &cfg.constellation()?,
        cfg.link.n_frames,
        link_seed,
    )?;
    let initial = measure_codeword(cfg, &scenario, &result.trace[0].codeword, link_seed)?;
    let best = measure_codeword(cfg, &scenario, &result.best_codeword, link_seed)?;
    let worst = measure_codeword(cfg, &scenario, &result.worst_codeword, link_seed)?;
    let diff = LinkMetrics {
        capacity: best.capacity - worst.capacity,
        snr_db: best.snr_db - worst.snr_db,
        uncoded_ber: worst.uncoded_ber - best.uncoded_ber,
    };
    Ok(StateReport {
        scenario_id: cfg.id.clone(),
        trial,
        algorithm: cfg.algorithm.kind,
        without_ris,
        initial,
        best,
        worst,
        diff,
        power_mw: power_consumption(&ris),
        result,
    })
}

/// [`run_state_study`] for trials `0..seeds.trials`, in trial order.
pub fn run_state_trials(cfg: &ScenarioConfig, codebook: Option<&McpCodebook>) -> Result<Vec<StateReport>> {
    cfg.validate()?;
    par::try_map_range(cfg.seeds.trials, |t| run_state_study(cfg, t, codebook))
}

/// Metrics of one trial with a fixed codeword, or with the RIS removed when
/// `codeword` is `None`.
pub fn simulate(cfg: &ScenarioConfig, trial: usize, codeword: Option<&PhaseCodeword>) -> Result<LinkMetrics> {
    let ris = cfg.array_config()?;
    let scenario = build_scenario(cfg, &ris, None, trial)?;
    let link_seed = derive(cfg.seeds.master, &[stream::LINK, 0, trial as u64]);
    match codeword {
        Some(c) => measure_codeword(cfg, &scenario, c, link_seed),
        None => measure_link(
            &scenario.channels,
            &RisState::Absent {
                include_sm: cfg.link.include_sm_in_baseline,
            },
            &scenario.noise,
            &cfg.constellation()?,
            cfg.link.n_frames,
            link_seed,
        ),
    }
}

/// Objective value of `codeword` on trial `trial`.
pub fn probe_value(cfg: &ScenarioConfig, trial: usize, codeword: &PhaseCodeword) -> Result<f64> {
    let ris = cfg.array_config()?;
    codeword.validate(&ris)?;
    let scenario = build_scenario(cfg, &ris, None, trial)?;
    let obj = ChannelObjective::new(&scenario.channels, &ris, &scenario.noise, cfg.algorithm.objective)?;
    Ok(obj.value(codeword))
}
