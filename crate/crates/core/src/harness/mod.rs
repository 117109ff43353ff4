//! Seeded studies over scenarios described by a [`ScenarioConfig`].
//!
//! * [`run_state_study`] optimises one trial and tabulates the without-RIS,
//!   initial, best and worst states.
//! * [`capacity_increase_map`] evaluates ΔC over a grid of receiver
//!   positions.
//! * [`gain_size_sweep`] and [`algorithm_efficiency`] reduce test-area
//!   samples to an ICDF statistic per cell.
//!
//! Work units draw from seeds derived from the master seed and their
//! indices, so outputs are identical for any thread count.

mod area;
mod config;
mod record;
mod scenario;
mod stats;
mod study;

pub use area::{
    algorithm_efficiency, area_positions, capacity_increase_map, cell_array, evaluate_area, evaluate_sample,
    gain_size_sweep, map_line, sweep_cells, EfficiencyPoint, SampleOutcome, SweepCell, MAP_HEADER,
};
pub use config::{
    check_budget, AlgorithmConfig, AlgorithmKind, CodebookConfig, GeometryConfig, LinkConfig, MapConfig, NoiseConfig,
    RisConfig, ScattererConfig, ScenarioConfig, SeedConfig, SweepConfig, SweepKind,
};
pub use record::{write_records, ResultRecord, RECORD_HEADER};
pub use scenario::{
    build_scenario, codebook_channel, codebook_rx_position, draw_scatterers, noise_for, plate_axes, ris_arrays,
    Scenario,
};
pub use stats::{icdf, mean, median, IcdfStat, DEFAULT_ICDF_LEVEL};
pub use study::{
    baseline_capacity, build_codebook, measure_codeword, optimize, probe_value, run_state_study, run_state_trials,
    simulate, StateReport,
};
