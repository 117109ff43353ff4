//! Conditional sample mean selection.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::oracle::{OptimizationResult, ProbeOracle};
use crate::ris::{random_codeword, PhaseCodeword, RisArrayConfig};
use crate::{Error, Result};

/// Random probes per RIS element.
pub const CSM_SAMPLES_PER_ELEMENT: usize = 8;

/// How the CSM random-probe budget is sized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CsmBudget {
    /// 8 × K, one count per controllable phase shifter.
    PerShifter,
    /// 8 × K_ris, one count per rRIS element.
    PerElement,
    Fixed(usize),
}

impl CsmBudget {
    pub fn samples(&self, cfg: &RisArrayConfig) -> usize {
        match *self {
            CsmBudget::PerShifter => CSM_SAMPLES_PER_ELEMENT * cfg.k(),
            CsmBudget::PerElement => CSM_SAMPLES_PER_ELEMENT * cfg.k_ris,
            CsmBudget::Fixed(n) => n,
        }
    }
}

impl Default for CsmBudget {
    fn default() -> Self {
        CsmBudget::PerShifter
    }
}

/// Probes `samples` uniform codewords, then sets every position to the phase
/// with the highest conditional sample mean of the objective (lowest index
/// on ties; phases never drawn at a position are skipped). The resulting
/// codeword is probed once more, for `samples + 1` probes in total. The
/// reported best is the best probe in the trace.
pub fn csm<R: Rng + ?Sized>(
    oracle: &mut ProbeOracle<'_>,
    cfg: &RisArrayConfig,
    rng: &mut R,
    samples: usize,
) -> Result<OptimizationResult> {
    if samples == 0 {
        return Err(Error::invalid("CSM needs at least one sample"));
    }
    let (k, m) = (cfg.k(), cfg.levels());
    let mut sums = vec![0.0f64; k * m];
    let mut counts = vec![0usize; k * m];
    for _ in 0..samples {
        let cw = random_codeword(cfg, rng);
        let v = oracle.evaluate(&cw);
        for (pos, &ph) in cw.indices().iter().enumerate() {
            sums[pos * m + ph] += v;
            counts[pos * m + ph] += 1;
        }
    }
    let mut chosen = Vec::with_capacity(k);
    for pos in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for ph in 0..m {
            let n = counts[pos * m + ph];
            if n == 0 {
                continue;
            }
            let mean = sums[pos * m + ph] / n as f64;
            if best.map_or(true, |(_, b)| mean > b) {
                best = Some((ph, mean));
            }
        }
        let (ph, _) = best.ok_or_else(|| Error::invalid(format!("no samples landed on position {pos}")))?;
        chosen.push(ph);
    }
    oracle.evaluate(&PhaseCodeword::new(chosen));
    OptimizationResult::from_trace(oracle.trace().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    fn cfg(k: usize, m: usize) -> RisArrayConfig {
        RisArrayConfig::ideal_passive(k, m, 0.04)
    }

    #[test]
    fn constant_objective_picks_lowest_phases() {
        let c = cfg(5, 4);
        let obj = |_: &PhaseCodeword| 2.5;
        let mut o = ProbeOracle::new(&obj, 5, 4);
        let r = csm(&mut o, &c, &mut rng_from_seed(1), 40).unwrap();
        assert_eq!(o.trace().last().unwrap().codeword, PhaseCodeword::zeros(5));
        assert_eq!(r.best_value, 2.5);
        assert_eq!(r.probe_count, 41);
    }

    #[test]
    fn default_budget_for_sixteen() {
        let c = cfg(16, 2);
        assert_eq!(CsmBudget::PerShifter.samples(&c), 128);
        let obj = |cw: &PhaseCodeword| cw.indices().iter().sum::<usize>() as f64;
        let mut o = ProbeOracle::new(&obj, 16, 2);
        let r = csm(&mut o, &c, &mut rng_from_seed(1), CsmBudget::default().samples(&c)).unwrap();
        assert_eq!(r.probe_count, 129);
    }

    #[test]
    fn per_element_reading() {
        let mut c = RisArrayConfig::ideal_active(4, 2, 10.0, 0.0, 0.04);
        c.n_d = 3;
        assert_eq!(CsmBudget::PerShifter.samples(&c), 96);
        assert_eq!(CsmBudget::PerElement.samples(&c), 32);
        assert_eq!(CsmBudget::Fixed(7).samples(&c), 7);
    }

    #[test]
    fn single_sample_still_selects() {
        // only one phase per position is observed; the rest are skipped
        let c = cfg(3, 4);
        let obj = |cw: &PhaseCodeword| cw.indices()[0] as f64;
        let mut o = ProbeOracle::new(&obj, 3, 4);
        let r = csm(&mut o, &c, &mut rng_from_seed(4), 1).unwrap();
        assert_eq!(r.probe_count, 2);
        assert_eq!(o.trace()[0].codeword, o.trace()[1].codeword);
        assert!(csm(&mut o, &c, &mut rng_from_seed(4), 0).is_err());
    }

    #[test]
    fn separable_objective_recovered_with_high_probability() {
        // f(c) = Σ w_k(c_k) + small coupling noise-free; 512 samples, K=4, M=2
        let c = cfg(4, 2);
        let w = [[0.0, 1.0], [0.8, 0.0], [0.0, 0.5], [0.3, 0.0]];
        let obj = |cw: &PhaseCodeword| cw.indices().iter().enumerate().map(|(k, &x)| w[k][x]).sum::<f64>();
        let target = [1usize, 0, 1, 0];
        let mut hits = 0;
        for seed in 0..100 {
            let mut o = ProbeOracle::new(&obj, 4, 2);
            csm(&mut o, &c, &mut rng_from_seed(seed), 512).unwrap();
            if o.trace().last().unwrap().codeword.indices() == target {
                hits += 1;
            }
        }
        assert!(hits > 95, "hits = {hits}");
    }
}
