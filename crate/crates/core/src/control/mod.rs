//! Channel-blind RIS control.
//!
//! Every algorithm sees the channel only through a [`ProbeOracle`]: it hands
//! over a codeword and gets back one scalar (capacity or SNR). The oracle
//! counts probes and records a trace, so algorithms can be compared at
//! equal probe budgets.

mod bg;
mod csm;
mod exhaustive;
mod mpc;
mod objective;
mod oracle;

pub use bg::{bg, default_rms_samples, greedy_search, rms};
pub use csm::{csm, CsmBudget, CSM_SAMPLES_PER_ELEMENT};
pub use exhaustive::exhaustive;
pub use mpc::{default_angles, mpc_build_codebook, mpc_select, CodebookEntry, McpCodebook};
pub use objective::{ChannelObjective, ObjectiveMetric};
pub use oracle::{read_trace, write_trace, Objective, OptimizationResult, Probe, ProbeOracle};
