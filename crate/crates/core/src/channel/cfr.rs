use std::f64::consts::PI;
use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::geometry::{steering_vector, ArrayGeometry, ScenarioGeometry};
use super::paths::{generate_paths, PathComponent};
use crate::ris::Phi;
use crate::{Error, Result, C64};

/// OFDM subcarrier grid centred on the carrier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyGrid {
    pub n_sc: usize,
    #[serde(default = "FrequencyGrid::default_scs")]
    pub scs: f64,
    #[serde(default = "FrequencyGrid::default_center")]
    pub center: f64,
    #[serde(default = "FrequencyGrid::default_bandwidth")]
    pub bandwidth: f64,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        Self {
            n_sc: 64,
            scs: Self::default_scs(),
            center: Self::default_center(),
            bandwidth: Self::default_bandwidth(),
        }
    }
}

impl FrequencyGrid {
    fn default_scs() -> f64 {
        60e3
    }
    fn default_center() -> f64 {
        3.5e9
    }
    fn default_bandwidth() -> f64 {
        100e6
    }

    pub fn new(n_sc: usize, scs: f64, center: f64) -> Result<Self> {
        let g = Self {
            n_sc,
            scs,
            center,
            bandwidth: Self::default_bandwidth(),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sc == 0 {
            return Err(Error::invalid("frequency grid needs at least one subcarrier"));
        }
        if !(self.scs > 0.0) || !(self.center > 0.0) {
            return Err(Error::invalid("subcarrier spacing and center frequency must be > 0"));
        }
        // tolerate rounding in configs that fill the band exactly
        if self.n_sc as f64 * self.scs > self.bandwidth * (1.0 + 1e-9) {
            return Err(Error::invalid(format!(
                "{} subcarriers x {} Hz exceed the {} Hz bandwidth",
                self.n_sc, self.scs, self.bandwidth
            )));
        }
        Ok(())
    }

    /// Offset of subcarrier `i` from the carrier, Hz.
    pub fn offset(&self, i: usize) -> f64 {
        (i as f64 - (self.n_sc as f64 - 1.0) / 2.0) * self.scs
    }
}

/// Frequency response of one link: `H[f] = Σ_p g_p a_rx(aoa_p) a_tx(aod_p)^H
/// exp(-j2π f_off τ_p)`. Steering vectors are evaluated at the centre
/// frequency; the carrier phase is part of `g_p`.
pub fn cfr_from_paths(
    paths: &[PathComponent],
    tx: &ArrayGeometry,
    rx: &ArrayGeometry,
    grid: &FrequencyGrid,
) -> Result<Vec<DMatrix<C64>>> {
    grid.validate()?;
    let outer: Vec<(DMatrix<C64>, f64)> = paths
        .iter()
        .map(|p| {
            let a_rx = steering_vector(rx, p.aoa, grid.center)?;
            let a_tx = steering_vector(tx, p.aod, grid.center)?;
            Ok(((a_rx * a_tx.adjoint()) * p.complex_gain, p.delay))
        })
        .collect::<Result<_>>()?;
    Ok((0..grid.n_sc)
        .map(|i| {
            let f = grid.offset(i);
            let mut h = DMatrix::zeros(rx.len(), tx.len());
            for (m, tau) in &outer {
                h += m * C64::from_polar(1.0, -2.0 * PI * f * tau);
            }
            h
        })
        .collect())
}

/// Channel matrices of one subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcarrierChannel {
    /// Non-RIS paths, `N_r × N_t`.
    pub los: DMatrix<C64>,
    /// Structural mode, `N_r × N_t`.
    pub sm: DMatrix<C64>,
    /// tRIS → Rx, `N_r × K`.
    pub am_r: DMatrix<C64>,
    /// Tx → rRIS, `K_ris × N_t`.
    pub am_t: DMatrix<C64>,
}

/// Channel matrices of every subcarrier for one scenario realisation.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    n_t: usize,
    n_r: usize,
    k_ris: usize,
    n_d: usize,
    subcarriers: Vec<SubcarrierChannel>,
}

impl ChannelSet {
    /// Checks that every subcarrier carries consistently sized matrices.
    pub fn new(n_d: usize, subcarriers: Vec<SubcarrierChannel>) -> Result<Self> {
        let first = subcarriers
            .first()
            .ok_or_else(|| Error::invalid("channel set needs at least one subcarrier"))?;
        let (n_r, n_t) = first.los.shape();
        let k_ris = first.am_t.nrows();
        if n_d == 0 {
            return Err(Error::invalid("n_d must be >= 1"));
        }
        let k = k_ris * n_d;
        for (i, s) in subcarriers.iter().enumerate() {
            let ok = s.los.shape() == (n_r, n_t)
                && s.sm.shape() == (n_r, n_t)
                && s.am_r.shape() == (n_r, k)
                && s.am_t.shape() == (k_ris, n_t);
            if !ok {
                return Err(Error::invalid(format!(
                    "subcarrier {i}: inconsistent matrix dimensions (expected N_r={n_r}, N_t={n_t}, K_ris={k_ris}, K={k})"
                )));
            }
        }
        Ok(Self {
            n_t,
            n_r,
            k_ris,
            n_d,
            subcarriers,
        })
    }

    /// Ray-traces the scenario and synthesises all four matrices per
    /// subcarrier.
    pub fn generate<R: Rng + ?Sized>(scenario: &ScenarioGeometry, grid: &FrequencyGrid, rng: &mut R) -> Result<Self> {
        let paths = generate_paths(scenario, rng)?;
        let los = cfr_from_paths(&paths.direct, &scenario.tx, &scenario.rx, grid)?;
        let sm = cfr_from_paths(&paths.sm, &scenario.tx, &scenario.rx, grid)?;
        let am_t = cfr_from_paths(&paths.tx_ris, &scenario.tx, &scenario.ris_r, grid)?;
        let am_r = cfr_from_paths(&paths.ris_rx, &scenario.ris_t, &scenario.rx, grid)?;
        let subcarriers = los
            .into_iter()
            .zip(sm)
            .zip(am_r.into_iter().zip(am_t))
            .map(|((los, sm), (am_r, am_t))| SubcarrierChannel { los, sm, am_r, am_t })
            .collect();
        Self::new(scenario.n_d(), subcarriers)
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }
    pub fn n_r(&self) -> usize {
        self.n_r
    }
    pub fn k_ris(&self) -> usize {
        self.k_ris
    }
    pub fn n_d(&self) -> usize {
        self.n_d
    }
    pub fn k(&self) -> usize {
        self.k_ris * self.n_d
    }
    pub fn n_sc(&self) -> usize {
        self.subcarriers.len()
    }
    pub fn subcarrier(&self, i: usize) -> &SubcarrierChannel {
        &self.subcarriers[i]
    }
    pub fn subcarriers(&self) -> &[SubcarrierChannel] {
        &self.subcarriers
    }

    /// Writes the set as plain text: a `dims` line, then for each
    /// subcarrier and matrix a `<sc> <name> <rows> <cols>` header followed by
    /// one line per row of whitespace-separated `re im` pairs. Floats use the
    /// shortest round-trip representation, so a dump reads back bit-exact.
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# ris-mimo channel dump v1")?;
        writeln!(
            w,
            "dims {} {} {} {} {}",
            self.n_t,
            self.n_r,
            self.k_ris,
            self.n_d,
            self.n_sc()
        )?;
        for (i, s) in self.subcarriers.iter().enumerate() {
            for (name, m) in [("los", &s.los), ("sm", &s.sm), ("am_r", &s.am_r), ("am_t", &s.am_t)] {
                writeln!(w, "{i} {name} {} {}", m.nrows(), m.ncols())?;
                for r in 0..m.nrows() {
                    let row: Vec<String> = (0..m.ncols())
                        .map(|c| format!("{:?} {:?}", m[(r, c)].re, m[(r, c)].im))
                        .collect();
                    writeln!(w, "{}", row.join(" "))?;
                }
            }
        }
        Ok(())
    }

    pub fn read_dump<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r
            .lines()
            .enumerate()
            .filter(|(_, l)| l.as_ref().map_or(true, |l| !l.starts_with('#') && !l.trim().is_empty()));
        let mut next = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((n, l)) => Ok((n + 1, l?)),
                None => Err(Error::Parse {
                    line: 0,
                    msg: format!("unexpected end of dump, expected {what}"),
                }),
            }
        };
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let (ln, dims) = next("dims")?;
        let d: Vec<usize> = dims
            .strip_prefix("dims ")
            .ok_or_else(|| perr(ln, "missing dims header".into()))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|e| perr(ln, format!("{e}"))))
            .collect::<Result<_>>()?;
        if d.len() != 5 {
            return Err(perr(ln, "dims needs 5 fields".into()));
        }
        let n_d = d[3];
        let mut subcarriers = Vec::with_capacity(d[4]);
        for _ in 0..d[4] {
            let mut mats = Vec::with_capacity(4);
            for _ in 0..4 {
                let (ln, head) = next("matrix header")?;
                let h: Vec<&str> = head.split_whitespace().collect();
                if h.len() != 4 {
                    return Err(perr(ln, "bad matrix header".into()));
                }
                let rows: usize = h[2].parse().map_err(|e| perr(ln, format!("{e}")))?;
                let cols: usize = h[3].parse().map_err(|e| perr(ln, format!("{e}")))?;
                let mut m = DMatrix::zeros(rows, cols);
                for r in 0..rows {
                    let (ln, row) = next("matrix row")?;
                    let v: Vec<f64> = row
                        .split_whitespace()
                        .map(|t| t.parse().map_err(|e| perr(ln, format!("{e}"))))
                        .collect::<Result<_>>()?;
                    if v.len() != 2 * cols {
                        return Err(perr(ln, format!("expected {} values, got {}", 2 * cols, v.len())));
                    }
                    for c in 0..cols {
                        m[(r, c)] = C64::new(v[2 * c], v[2 * c + 1]);
                    }
                }
                mats.push(m);
            }
            let am_t = mats.pop().unwrap();
            let am_r = mats.pop().unwrap();
            let sm = mats.pop().unwrap();
            let los = mats.pop().unwrap();
            subcarriers.push(SubcarrierChannel { los, sm, am_r, am_t });
        }
        Self::new(n_d, subcarriers)
    }
}

/// `H = H_los + H_sm + H_am_r Φ (1_{N_d} ⊗ H_am_t)`.
///
/// Row `k` of the replicated Tx→RIS matrix is row `k mod K_ris` of `H_am_t`,
/// so the product folds `H_am_r Φ` onto the `K_ris` rRIS columns first.
pub fn compose_channel(cs: &ChannelSet, phi: &Phi, subcarrier: usize) -> Result<DMatrix<C64>> {
    if phi.len() != cs.k() {
        return Err(Error::invalid(format!(
            "Φ has {} entries but the channel set has K = {}",
            phi.len(),
            cs.k()
        )));
    }
    if subcarrier >= cs.n_sc() {
        return Err(Error::invalid(format!("subcarrier {subcarrier} out of range")));
    }
    let s = &cs.subcarriers[subcarrier];
    let k_ris = cs.k_ris;
    let mut folded = DMatrix::<C64>::zeros(cs.n_r, k_ris);
    for (k, p) in phi.diagonal().iter().enumerate() {
        let kr = k % k_ris;
        for r in 0..cs.n_r {
            folded[(r, kr)] += s.am_r[(r, k)] * p;
        }
    }
    Ok(&s.los + &s.sm + folded * &s.am_t)
}

/// Channel with the RIS removed entirely; the plate's structural-mode
/// reflection is kept when `include_sm` is set.
pub fn compose_without_ris(cs: &ChannelSet, subcarrier: usize, include_sm: bool) -> Result<DMatrix<C64>> {
    if subcarrier >= cs.n_sc() {
        return Err(Error::invalid(format!("subcarrier {subcarrier} out of range")));
    }
    let s = &cs.subcarriers[subcarrier];
    Ok(if include_sm { &s.los + &s.sm } else { s.los.clone() })
}
