use super::oracle::{OptimizationResult, ProbeOracle};
use crate::ris::{codeword_space_size, PhaseCodeword, RisArrayConfig};
use crate::{Error, Result};

/// Probes every codeword. Position 0 varies fastest. Refused when `M^K`
/// exceeds `limit`.
pub fn exhaustive(oracle: &mut ProbeOracle<'_>, cfg: &RisArrayConfig, limit: u64) -> Result<OptimizationResult> {
    let total = codeword_space_size(cfg, limit).ok_or(Error::SpaceTooLarge {
        levels: cfg.levels(),
        len: cfg.k(),
        limit,
    })?;
    let (k, m) = (cfg.k(), cfg.levels());
    let mut cw = PhaseCodeword::zeros(k);
    for n in 0..total {
        let mut rem = n;
        for pos in 0..k {
            cw.set(pos, (rem % m as u64) as usize);
            rem /= m as u64;
        }
        oracle.evaluate(&cw);
    }
    OptimizationResult::from_trace(oracle.trace().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_everything_once() {
        let cfg = RisArrayConfig::ideal_passive(3, 4, 0.04);
        let obj = |c: &PhaseCodeword| (c.indices()[0] * 16 + c.indices()[1] * 4 + c.indices()[2]) as f64;
        let mut o = ProbeOracle::new(&obj, 3, 4);
        let r = exhaustive(&mut o, &cfg, 1024).unwrap();
        assert_eq!(r.probe_count, 64);
        let mut vals: Vec<u64> = o.trace().iter().map(|p| p.value as u64).collect();
        vals.sort();
        assert_eq!(vals, (0..64).collect::<Vec<_>>());
        assert_eq!(r.best_codeword.indices(), &[3, 3, 3]);
    }

    #[test]
    fn refuses_large_spaces() {
        let cfg = RisArrayConfig::ideal_passive(16, 4, 0.04);
        let obj = |_: &PhaseCodeword| 0.0;
        let mut o = ProbeOracle::new(&obj, 16, 4);
        assert!(matches!(
            exhaustive(&mut o, &cfg, 1024),
            Err(Error::SpaceTooLarge { .. })
        ));
        assert_eq!(o.probe_count(), 0);
    }
}
