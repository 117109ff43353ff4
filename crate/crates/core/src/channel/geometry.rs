use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::Vec3;
use crate::{Error, Result, C64, SPEED_OF_LIGHT};

/// Positions of the elements of one antenna array.
///
/// Element 0 is the phase reference: steering vectors are computed from
/// offsets relative to it and rays leave or reach the array there.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    pub element_positions: Vec<Vec3>,
    pub carrier_freq: f64,
    /// Boresight. Elements are isotropic, so this is descriptive only.
    pub orientation: Vec3,
}

impl ArrayGeometry {
    pub fn new(element_positions: Vec<Vec3>, carrier_freq: f64, orientation: Vec3) -> Result<Self> {
        if element_positions.is_empty() {
            return Err(Error::invalid("array needs at least one element"));
        }
        if element_positions.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::invalid("array element positions must be finite"));
        }
        if !(carrier_freq > 0.0) {
            return Err(Error::invalid("carrier frequency must be > 0"));
        }
        Ok(Self {
            element_positions,
            carrier_freq,
            orientation,
        })
    }

    /// Uniform linear array of `n` elements centred on `center` along `axis`.
    pub fn ula(center: Vec3, axis: Vec3, n: usize, spacing: f64, carrier_freq: f64, orientation: Vec3) -> Result<Self> {
        let axis = unit(axis)?;
        let half = (n as f64 - 1.0) / 2.0;
        let pos = (0..n).map(|i| center + axis * ((i as f64 - half) * spacing)).collect();
        Self::new(pos, carrier_freq, orientation)
    }

    /// Uniform planar array, `cols` elements along `axis_u` by `rows` along
    /// `axis_v`, centred on `center`. Element index is `row * cols + col`.
    pub fn upa(
        center: Vec3,
        axis_u: Vec3,
        axis_v: Vec3,
        cols: usize,
        rows: usize,
        spacing: f64,
        carrier_freq: f64,
        orientation: Vec3,
    ) -> Result<Self> {
        let (u, v) = (unit(axis_u)?, unit(axis_v)?);
        let hu = (cols as f64 - 1.0) / 2.0;
        let hv = (rows as f64 - 1.0) / 2.0;
        let mut pos = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                pos.push(center + u * ((c as f64 - hu) * spacing) + v * ((r as f64 - hv) * spacing));
            }
        }
        Self::new(pos, carrier_freq, orientation)
    }

    pub fn len(&self) -> usize {
        self.element_positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.element_positions.is_empty()
    }

    pub fn reference(&self) -> Vec3 {
        self.element_positions[0]
    }

    pub fn centroid(&self) -> Vec3 {
        self.element_positions.iter().sum::<Vec3>() / self.len() as f64
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq
    }

    pub fn translated(&self, offset: Vec3) -> Self {
        Self {
            element_positions: self.element_positions.iter().map(|p| p + offset).collect(),
            ..self.clone()
        }
    }
}

pub(crate) fn unit(v: Vec3) -> Result<Vec3> {
    let n = v.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::invalid("direction vector must be non-zero and finite"));
    }
    Ok(v / n)
}

/// Point scatterer with a power reflection coefficient in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scatterer {
    pub position: [f64; 3],
    pub reflection_db: f64,
}

impl Scatterer {
    pub fn pos(&self) -> Vec3 {
        Vec3::from(self.position)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioGeometry {
    pub tx: ArrayGeometry,
    pub rx: ArrayGeometry,
    /// rRIS antennas, one per element.
    pub ris_r: ArrayGeometry,
    /// tRIS antennas, branch-major: index `d * k_ris + element`.
    pub ris_t: ArrayGeometry,
    pub los_blocked: bool,
    pub scatterers: Vec<Scatterer>,
    pub sm_gain_db: f64,
}

impl ScenarioGeometry {
    pub fn validate(&self) -> Result<()> {
        if self.ris_t.len() % self.ris_r.len() != 0 {
            return Err(Error::invalid(format!(
                "tRIS count {} is not a multiple of rRIS count {}",
                self.ris_t.len(),
                self.ris_r.len()
            )));
        }
        let refs = [
            ("tx", self.tx.reference()),
            ("rx", self.rx.reference()),
            ("rRIS", self.ris_r.reference()),
            ("tRIS", self.ris_t.reference()),
        ];
        for (i, (na, a)) in refs.iter().enumerate() {
            for (nb, b) in &refs[i + 1..] {
                if *na == "rRIS" && *nb == "tRIS" {
                    continue;
                }
                if !((a - b).norm() > 0.0) {
                    return Err(Error::invalid(format!("{na} and {nb} arrays coincide")));
                }
            }
        }
        if self
            .scatterers
            .iter()
            .any(|s| !s.position.iter().all(|c| c.is_finite()) || !s.reflection_db.is_finite())
        {
            return Err(Error::invalid("scatterer parameters must be finite"));
        }
        Ok(())
    }

    pub fn n_d(&self) -> usize {
        self.ris_t.len() / self.ris_r.len()
    }
}

/// Far-field array response: entry n is `exp(-j 2π f/c <u, p_n - p_0>)`
/// with `u` the unit propagation direction.
pub fn steering_vector(array: &ArrayGeometry, direction: Vec3, freq: f64) -> Result<DVector<C64>> {
    let u = unit(direction)?;
    let k = 2.0 * PI * freq / SPEED_OF_LIGHT;
    let p0 = array.reference();
    Ok(DVector::from_iterator(
        array.len(),
        array
            .element_positions
            .iter()
            .map(|p| C64::from_polar(1.0, -k * u.dot(&(p - p0)))),
    ))
}

/// Free-space amplitude gain `λ / (4π d)`.
pub fn friis_gain(distance: f64, freq: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::invalid(format!("distance must be > 0, got {distance}")));
    }
    if !(freq > 0.0) {
        return Err(Error::invalid("frequency must be > 0"));
    }
    Ok(SPEED_OF_LIGHT / freq / (4.0 * PI * distance))
}
