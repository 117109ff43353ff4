use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::ris::PhaseCodeword;
use crate::{Error, Result};

/// Scalar figure of merit of a codeword.
pub trait Objective: Sync {
    fn value(&self, codeword: &PhaseCodeword) -> f64;
}

impl<F> Objective for F
where
    F: Fn(&PhaseCodeword) -> f64 + Sync,
{
    fn value(&self, codeword: &PhaseCodeword) -> f64 {
        self(codeword)
    }
}

/// One evaluated codeword.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    /// Zero-based position in the trace.
    pub index: usize,
    pub codeword: PhaseCodeword,
    pub value: f64,
}

/// Counting, recording front end to an [`Objective`]; the only channel
/// access control algorithms get.
pub struct ProbeOracle<'o> {
    objective: &'o dyn Objective,
    len: usize,
    levels: usize,
    trace: Vec<Probe>,
}

impl<'o> ProbeOracle<'o> {
    /// Oracle over codewords of `len` entries with `levels` states each.
    pub fn new(objective: &'o dyn Objective, len: usize, levels: usize) -> Self {
        Self {
            objective,
            len,
            levels,
            trace: Vec::new(),
        }
    }

    /// Probes `codeword` once.
    ///
    /// # Panics
    ///
    /// If the codeword has the wrong length or an index out of range; the
    /// algorithms only ever build valid codewords.
    pub fn evaluate(&mut self, codeword: &PhaseCodeword) -> f64 {
        assert_eq!(codeword.len(), self.len, "codeword length mismatch");
        assert!(
            codeword.indices().iter().all(|&i| i < self.levels),
            "phase index out of range"
        );
        let value = self.objective.value(codeword);
        self.trace.push(Probe {
            index: self.trace.len(),
            codeword: codeword.clone(),
            value,
        });
        value
    }

    pub fn probe_count(&self) -> usize {
        self.trace.len()
    }

    pub fn trace(&self) -> &[Probe] {
        &self.trace
    }

    pub fn into_trace(self) -> Vec<Probe> {
        self.trace
    }
}

/// Outcome of one optimisation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_codeword: PhaseCodeword,
    pub best_value: f64,
    pub worst_codeword: PhaseCodeword,
    pub worst_value: f64,
    /// Value of the first probe, i.e. the state before optimisation.
    pub initial_value: f64,
    pub probe_count: usize,
    pub trace: Vec<Probe>,
}

impl OptimizationResult {
    /// Extrema of a trace; the earliest probe wins ties.
    pub fn from_trace(trace: Vec<Probe>) -> Result<Self> {
        let first = trace
            .first()
            .ok_or_else(|| Error::invalid("cannot summarise an empty probe trace"))?;
        let mut best = first;
        let mut worst = first;
        for p in &trace[1..] {
            if p.value > best.value {
                best = p;
            }
            if p.value < worst.value {
                worst = p;
            }
        }
        Ok(Self {
            best_codeword: best.codeword.clone(),
            best_value: best.value,
            worst_codeword: worst.codeword.clone(),
            worst_value: worst.value,
            initial_value: first.value,
            probe_count: trace.len(),
            trace,
        })
    }

    /// Running maximum of the trace, one entry per probe.
    pub fn running_best(&self) -> Vec<f64> {
        self.trace
            .iter()
            .scan(f64::NEG_INFINITY, |m, p| {
                *m = m.max(p.value);
                Some(*m)
            })
            .collect()
    }
}

/// Writes a trace as `probe,value,codeword` lines under a header.
pub fn write_trace<W: Write>(mut w: W, trace: &[Probe]) -> Result<()> {
    writeln!(w, "probe,value,codeword")?;
    for p in trace {
        writeln!(w, "{},{},{}", p.index, p.value, p.codeword)?;
    }
    Ok(())
}

pub fn read_trace<R: BufRead>(r: R) -> Result<Vec<Probe>> {
    let mut out = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        if n == 0 || line.trim().is_empty() {
            continue;
        }
        let perr = |msg: String| Error::Parse { line: n + 1, msg };
        let mut f = line.splitn(3, ',');
        let (Some(i), Some(v), Some(c)) = (f.next(), f.next(), f.next()) else {
            return Err(perr("expected probe,value,codeword".into()));
        };
        out.push(Probe {
            index: i.parse().map_err(|e| perr(format!("{e}")))?,
            value: v.parse().map_err(|e| perr(format!("{e}")))?,
            codeword: c.parse()?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_objective(c: &PhaseCodeword) -> f64 {
        c.indices().iter().sum::<usize>() as f64
    }

    #[test]
    fn counts_every_call() {
        let obj = sum_objective;
        let mut o = ProbeOracle::new(&obj, 3, 2);
        assert_eq!(o.probe_count(), 0);
        o.evaluate(&PhaseCodeword::new(vec![0, 1, 1]));
        o.evaluate(&PhaseCodeword::new(vec![0, 1, 1]));
        assert_eq!(o.probe_count(), 2);
        assert_eq!(o.trace()[1].index, 1);
    }

    #[test]
    #[should_panic]
    fn rejects_out_of_range() {
        let obj = sum_objective;
        let mut o = ProbeOracle::new(&obj, 2, 2);
        o.evaluate(&PhaseCodeword::new(vec![0, 2]));
    }

    #[test]
    fn extrema_with_earliest_ties() {
        let mk = |i: usize, v: f64| Probe {
            index: i,
            codeword: PhaseCodeword::new(vec![i]),
            value: v,
        };
        let r =
            OptimizationResult::from_trace(vec![mk(0, 2.0), mk(1, 5.0), mk(2, 5.0), mk(3, 1.0), mk(4, 1.0)]).unwrap();
        assert_eq!(r.best_codeword.indices(), &[1]);
        assert_eq!(r.worst_codeword.indices(), &[3]);
        assert_eq!((r.best_value, r.worst_value, r.initial_value), (5.0, 1.0, 2.0));
        assert_eq!(r.running_best(), vec![2.0, 5.0, 5.0, 5.0, 5.0]);
        assert!(OptimizationResult::from_trace(vec![]).is_err());
    }

    #[test]
    fn trace_text_round_trip() {
        let trace = vec![
            Probe {
                index: 0,
                codeword: PhaseCodeword::new(vec![0, 3]),
                value: 1.25,
            },
            Probe {
                index: 1,
                codeword: PhaseCodeword::new(vec![2, 1]),
                value: 0.1 + 0.2,
            },
        ];
        let mut buf = Vec::new();
        write_trace(&mut buf, &trace).unwrap();
        assert!(String::from_utf8(buf.clone())
            .unwrap()
            .starts_with("probe,value,codeword\n0,1.25,0 3\n"));
        assert_eq!(read_trace(std::io::Cursor::new(buf)).unwrap(), trace);
    }
}
