use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default coverage level of the capacity-increase statistic.
pub const DEFAULT_ICDF_LEVEL: f64 = 0.68;

/// Value met or exceeded by a fraction `level` of the samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IcdfStat {
    pub level: f64,
    pub value: f64,
}

fn sorted(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::invalid("statistic of an empty sample set"));
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("sample set contains NaN"));
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

/// Nearest-rank lower quantile: with the samples sorted ascending, returns
/// the one at 1-based rank `n + 1 - ceil(level * n)`, so at least
/// `level * n` samples are ≥ the result. `level = 1` gives the minimum.
pub fn icdf(samples: &[f64], level: f64) -> Result<IcdfStat> {
    if !(level > 0.0 && level <= 1.0) {
        return Err(Error::invalid(format!("ICDF level must be in (0, 1], got {level}")));
    }
    let s = sorted(samples)?;
    let n = s.len();
    // the epsilon keeps exact products such as 0.68 * 100 from rounding up
    let need = ((level * n as f64 - 1e-9).ceil() as usize).clamp(1, n);
    Ok(IcdfStat {
        level,
        value: s[n - need],
    })
}

/// Lower median (the `ceil(n/2)`-th smallest sample).
pub fn median(samples: &[f64]) -> Result<f64> {
    let s = sorted(samples)?;
    Ok(s[(s.len() - 1) / 2])
}

pub fn mean(samples: &[f64]) -> f64 {
    samples.iter().sum::<f64>() / samples.len() as f64
}
