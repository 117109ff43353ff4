//! Blind greedy: random-max sampling followed by one coordinate sweep.

use rand::Rng;

use super::oracle::{OptimizationResult, ProbeOracle};
use crate::ris::{random_codeword, PhaseCodeword, RisArrayConfig};
use crate::{Error, Result};

/// Default RMS draw count, `max(16, K)`.
pub fn default_rms_samples(cfg: &RisArrayConfig) -> usize {
    cfg.k().max(16)
}

/// Random-max sampling: probes `r_samples` uniform codewords and keeps the
/// best (earliest on ties).
pub fn rms<R: Rng + ?Sized>(
    oracle: &mut ProbeOracle<'_>,
    r_samples: usize,
    cfg: &RisArrayConfig,
    rng: &mut R,
) -> Result<(PhaseCodeword, f64)> {
    if r_samples == 0 {
        return Err(Error::invalid("RMS needs at least one sample"));
    }
    let mut best: Option<(PhaseCodeword, f64)> = None;
    for _ in 0..r_samples {
        let cw = random_codeword(cfg, rng);
        let v = oracle.evaluate(&cw);
        if best.as_ref().map_or(true, |(_, b)| v > *b) {
            best = Some((cw, v));
        }
    }
    Ok(best.expect("r_samples >= 1"))
}

/// Greedy coordinate search from `init`.
///
/// Visits positions `0..K` once in order; at each position probes all `M`
/// states (including the incumbent) with the other positions fixed, and
/// keeps the best, lowest index on ties. Uses exactly `K * M` probes. The
/// result summarises the oracle's whole trace, with the final greedy
/// codeword as the best.
pub fn greedy_search(
    oracle: &mut ProbeOracle<'_>,
    init: &PhaseCodeword,
    cfg: &RisArrayConfig,
) -> Result<OptimizationResult> {
    init.validate(cfg)?;
    let mut current = init.clone();
    let mut current_value = f64::NEG_INFINITY;
    for k in 0..cfg.k() {
        let mut best = (current.indices()[k], f64::NEG_INFINITY);
        for m in 0..cfg.levels() {
            let v = oracle.evaluate(&current.with(k, m));
            if v > best.1 {
                best = (m, v);
            }
        }
        current.set(k, best.0);
        current_value = best.1;
    }
    let mut result = OptimizationResult::from_trace(oracle.trace().to_vec())?;
    if current_value >= result.best_value {
        result.best_value = current_value;
        result.best_codeword = current;
    }
    Ok(result)
}

/// RMS with `r_samples` draws, then [`greedy_search`] from the RMS winner.
/// Total probes: `r_samples + K * M`.
pub fn bg<R: Rng + ?Sized>(
    oracle: &mut ProbeOracle<'_>,
    r_samples: usize,
    cfg: &RisArrayConfig,
    rng: &mut R,
) -> Result<OptimizationResult> {
    let (start, _) = rms(oracle, r_samples, cfg, rng)?;
    greedy_search(oracle, &start, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::exhaustive;
    use crate::seed::rng_from_seed;
    use proptest::prelude::*;
    use rand::Rng;

    fn cfg(k: usize, m: usize) -> RisArrayConfig {
        RisArrayConfig::ideal_passive(k, m, 0.04)
    }

    /// Σ_k w[k][c_k] with random weights.
    fn separable(seed: u64, k: usize, m: usize) -> impl Fn(&PhaseCodeword) -> f64 + Sync {
        let mut rng = rng_from_seed(seed);
        let w: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..m).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        move |c: &PhaseCodeword| c.indices().iter().enumerate().map(|(i, &x)| w[i][x]).sum()
    }

    #[test]
    fn single_draw_rms() {
        let c = cfg(4, 2);
        let obj = separable(1, 4, 2);
        let mut o = ProbeOracle::new(&obj, 4, 2);
        let (cw, v) = rms(&mut o, 1, &c, &mut rng_from_seed(3)).unwrap();
        assert_eq!(o.probe_count(), 1);
        assert_eq!(o.trace()[0].codeword, cw);
        assert_eq!(o.trace()[0].value, v);
        assert!(rms(&mut o, 0, &c, &mut rng_from_seed(3)).is_err());
    }

    #[test]
    fn rms_covering_all_codewords_finds_max() {
        let c = cfg(2, 2);
        let obj = |cw: &PhaseCodeword| [3.0, -1.0, 7.0, 0.5][cw.indices()[0] + 2 * cw.indices()[1]];
        // draw until all four codewords appear within the r draws of a seed
        for seed in 0..200 {
            let mut o = ProbeOracle::new(&obj, 2, 2);
            let (cw, v) = rms(&mut o, 16, &c, &mut rng_from_seed(seed)).unwrap();
            let distinct: std::collections::HashSet<_> = o.trace().iter().map(|p| p.codeword.clone()).collect();
            if distinct.len() == 4 {
                assert_eq!(v, 7.0);
                assert_eq!(cw.indices(), &[0, 1]);
            }
        }
    }

    #[test]
    fn greedy_single_coordinate_is_exhaustive() {
        let c = cfg(1, 16);
        let obj = |cw: &PhaseCodeword| -((cw.indices()[0] as f64) - 10.3).powi(2);
        let mut o = ProbeOracle::new(&obj, 1, 16);
        let r = greedy_search(&mut o, &PhaseCodeword::zeros(1), &c).unwrap();
        assert_eq!(r.best_codeword.indices(), &[10]);
        assert_eq!(r.probe_count, 16);
    }

    #[test]
    fn greedy_budget_is_k_times_m() {
        for (k, m) in [(16, 2), (4, 4), (7, 8)] {
            let c = cfg(k, m);
            let obj = separable(k as u64, k, m);
            let mut o = ProbeOracle::new(&obj, k, m);
            let r = greedy_search(&mut o, &PhaseCodeword::zeros(k), &c).unwrap();
            assert_eq!(r.probe_count, k * m);
        }
    }

    #[test]
    fn greedy_ties_choose_lowest_index() {
        let c = cfg(3, 4);
        let obj = |_: &PhaseCodeword| 1.0;
        let mut o = ProbeOracle::new(&obj, 3, 4);
        let r = greedy_search(&mut o, &PhaseCodeword::new(vec![3, 2, 1]), &c).unwrap();
        assert_eq!(r.best_codeword.indices(), &[0, 0, 0]);
    }

    #[test]
    fn bg_budget_and_running_best() {
        let c = cfg(16, 2);
        let obj = separable(5, 16, 2);
        let mut o = ProbeOracle::new(&obj, 16, 2);
        let r = bg(&mut o, default_rms_samples(&c), &c, &mut rng_from_seed(2)).unwrap();
        assert_eq!(r.probe_count, 16 + 32);
        let rb = r.running_best();
        assert!(rb.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(*rb.last().unwrap(), r.best_value);
        assert!(r.best_value >= r.initial_value && r.initial_value >= r.worst_value);
    }

    #[test]
    fn bg_on_two_by_two_finds_exhaustive_max() {
        let c = cfg(2, 2);
        for seed in 0..50 {
            let obj = |cw: &PhaseCodeword| {
                let t = [0.3, 2.0, -1.0, 1.1];
                t[cw.indices()[0] * 2 + cw.indices()[1]] + seed as f64 * 0.0
            };
            let mut o = ProbeOracle::new(&obj, 2, 2);
            let r = bg(&mut o, 4, &c, &mut rng_from_seed(seed)).unwrap();
            let mut e = ProbeOracle::new(&obj, 2, 2);
            let ex = exhaustive(&mut e, &c, 1024).unwrap();
            assert_eq!(r.best_value, ex.best_value);
        }
    }

    #[test]
    fn default_r() {
        assert_eq!(default_rms_samples(&cfg(4, 2)), 16);
        assert_eq!(default_rms_samples(&cfg(64, 2)), 64);
    }

    proptest! {
        #[test]
        fn greedy_solves_separable_objectives(seed in any::<u64>(), k in 1usize..6, mlog in 1u32..3) {
            let m = 1usize << mlog;
            let c = cfg(k, m);
            let obj = separable(seed, k, m);
            let mut o = ProbeOracle::new(&obj, k, m);
            let init = random_codeword(&c, &mut rng_from_seed(seed ^ 77));
            let g = greedy_search(&mut o, &init, &c).unwrap();
            let mut e = ProbeOracle::new(&obj, k, m);
            let ex = exhaustive(&mut e, &c, 1 << 20).unwrap();
            prop_assert!((g.best_value - ex.best_value).abs() < 1e-12);
            prop_assert!(g.best_value >= o.trace()[0].value);
        }
    }
}
