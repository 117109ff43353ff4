//! Line-oriented result files.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::Result;

/// Column order of [`ResultRecord`] lines.
pub const RECORD_HEADER: &str = "scenario_id,seed,algorithm,probes,capacity,snr_db,ber,delta_c,power_mw";

/// One result line. Floats are written in their shortest round-trip form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    /// Must not contain commas or newlines.
    pub scenario_id: String,
    pub seed: u64,
    pub algorithm: String,
    pub probes: usize,
    pub capacity: f64,
    pub snr_db: f64,
    pub ber: f64,
    /// Capacity gain over the without-RIS baseline, bps/Hz.
    pub delta_c: f64,
    pub power_mw: f64,
}

impl ResultRecord {
    pub fn to_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.scenario_id.replace([',', '\n'], "_"),
            self.seed,
            self.algorithm,
            self.probes,
            self.capacity,
            self.snr_db,
            self.ber,
            self.delta_c,
            self.power_mw
        )
    }
}

/// Header plus one line per record.
pub fn write_records<W: Write>(mut w: W, records: &[ResultRecord]) -> Result<()> {
    writeln!(w, "{RECORD_HEADER}")?;
    for r in records {
        writeln!(w, "{}", r.to_line())?;
    }
    Ok(())
}
