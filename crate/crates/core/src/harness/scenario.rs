//! Turns a [`ScenarioConfig`] into geometry and channel realisations.

use rand::Rng;

use super::config::ScenarioConfig;
use crate::channel::{ArrayGeometry, ChannelSet, Scatterer, ScenarioGeometry, Vec3};
use crate::link::NoiseSpec;
use crate::ris::{RisArrayConfig, RisMode};
use crate::seed::{derive_rng, stream};
use crate::{Error, Result};

/// One channel realisation with everything needed to evaluate it.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub geometry: ScenarioGeometry,
    pub channels: ChannelSet,
    pub ris: RisArrayConfig,
    pub noise: NoiseSpec,
}

/// In-plane axes `(u, v)` of a plate with boresight `normal`: `u = n × z`
/// is horizontal and `v = u × n`, so `(u, v, n)` is right-handed.
pub fn plate_axes(normal: Vec3) -> Result<(Vec3, Vec3)> {
    let n = normal
        .try_normalize(0.0)
        .ok_or_else(|| Error::invalid("geometry.ris_normal must be non-zero"))?;
    let u = n.cross(&Vec3::z()).try_normalize(1e-12).unwrap_or_else(Vec3::x);
    Ok((u, u.cross(&n)))
}

/// rRIS and tRIS arrays. Passive elements receive and re-radiate on the
/// same antenna. Active branch `d` sits `(d + 1) / 2` element pitches
/// above its rRIS antenna along `v`.
pub fn ris_arrays(cfg: &ScenarioConfig, ris: &RisArrayConfig) -> Result<(ArrayGeometry, ArrayGeometry)> {
    let g = &cfg.geometry;
    let normal = Vec3::from(g.ris_normal);
    let (u, v) = plate_axes(normal)?;
    let cols = cfg.ris_cols();
    let rows = ris.k_ris / cols;
    let ris_r = ArrayGeometry::upa(
        Vec3::from(g.ris_position),
        u,
        v,
        cols,
        rows,
        ris.element_spacing,
        cfg.ofdm.center,
        normal,
    )?;
    let ris_t = match ris.mode {
        RisMode::Passive if ris.n_d == 1 => ris_r.clone(),
        _ => {
            let mut pos = Vec::with_capacity(ris.k());
            for d in 0..ris.n_d {
                let off = v * (ris.element_spacing * (d + 1) as f64 / 2.0);
                pos.extend(ris_r.element_positions.iter().map(|p| p + off));
            }
            ArrayGeometry::new(pos, cfg.ofdm.center, normal)?
        }
    };
    Ok((ris_r, ris_t))
}

fn ula(cfg: &ScenarioConfig, center: [f64; 3], axis: [f64; 3], n: usize, facing: Vec3) -> Result<ArrayGeometry> {
    let c = Vec3::from(center);
    let facing = (facing - c).try_normalize(0.0).unwrap_or_else(Vec3::x);
    ArrayGeometry::ula(c, Vec3::from(axis), n, cfg.antenna_spacing(), cfg.ofdm.center, facing)
}

/// Scatterers of one trial: the explicit list followed by `count` points
/// drawn uniformly in the configured box.
pub fn draw_scatterers<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Vec<Scatterer> {
    let s = &cfg.geometry.scatterers;
    let mut out = s.explicit.clone();
    for _ in 0..s.count {
        let mut p = [0.0; 3];
        for (i, c) in p.iter_mut().enumerate() {
            *c = if s.region_max[i] > s.region_min[i] {
                rng.random_range(s.region_min[i]..s.region_max[i])
            } else {
                s.region_min[i]
            };
        }
        out.push(Scatterer {
            position: p,
            reflection_db: s.reflection_db,
        });
    }
    out
}

/// Realisation of trial `trial` with the receiver at `rx_position` (the
/// configured one when `None`).
///
/// Scatterer placement and reflection phases come from the stream derived
/// from `(master, trial)` only, so every receiver position of a trial sees
/// the same environment.
pub fn build_scenario(
    cfg: &ScenarioConfig,
    ris: &RisArrayConfig,
    rx_position: Option<[f64; 3]>,
    trial: usize,
) -> Result<Scenario> {
    let g = &cfg.geometry;
    let mut rng = derive_rng(cfg.seeds.master, &[stream::SCENARIO, trial as u64]);
    let (ris_r, ris_t) = ris_arrays(cfg, ris)?;
    let centre = ris_r.centroid();
    let geometry = ScenarioGeometry {
        tx: ula(cfg, g.tx_position, g.tx_axis, g.n_tx, centre)?,
        rx: ula(cfg, rx_position.unwrap_or(g.rx_position), g.rx_axis, g.n_rx, centre)?,
        ris_r,
        ris_t,
        los_blocked: g.los_blocked,
        scatterers: draw_scatterers(cfg, &mut rng),
        sm_gain_db: g.sm_gain_db,
    };
    let channels = ChannelSet::generate(&geometry, &cfg.ofdm, &mut rng)?;
    Ok(Scenario {
        geometry,
        channels,
        ris: ris.clone(),
        noise: noise_for(cfg, ris)?,
    })
}

/// Receiver noise from the config; amplifier noise only for active arrays.
pub fn noise_for(cfg: &ScenarioConfig, ris: &RisArrayConfig) -> Result<NoiseSpec> {
    match ris.mode {
        RisMode::Passive => NoiseSpec::passive(cfg.noise.sigma_z2),
        RisMode::Active => NoiseSpec::new(cfg.noise.sigma_v2.unwrap_or(cfg.noise.sigma_z2), cfg.noise.sigma_z2),
    }
}

/// Receiver position at bearing `angle_deg` on the codebook half circle.
pub fn codebook_rx_position(cfg: &ScenarioConfig, angle_deg: f64) -> Result<Vec3> {
    let normal = Vec3::from(cfg.geometry.ris_normal);
    let (u, _) = plate_axes(normal)?;
    let n = normal.normalize();
    let t = angle_deg.to_radians();
    Ok(Vec3::from(cfg.geometry.ris_position) + (u * t.cos() + n * t.sin()) * cfg.codebook.radius)
}

/// Free-space SISO channel used to learn the codebook entry for
/// `angle_deg`: one Tx antenna at the configured Tx centre, one Rx antenna
/// on the half circle, no scatterers and the direct Tx-Rx ray removed, so
/// the entry depends only on the RIS paths.
pub fn codebook_channel(cfg: &ScenarioConfig, ris: &RisArrayConfig, angle_deg: f64) -> Result<ChannelSet> {
    let (ris_r, ris_t) = ris_arrays(cfg, ris)?;
    let centre = ris_r.centroid();
    let f = cfg.ofdm.center;
    let tx = Vec3::from(cfg.geometry.tx_position);
    let rx = codebook_rx_position(cfg, angle_deg)?;
    let geometry = ScenarioGeometry {
        tx: ArrayGeometry::new(vec![tx], f, (centre - tx).normalize())?,
        rx: ArrayGeometry::new(vec![rx], f, (centre - rx).normalize())?,
        ris_r,
        ris_t,
        los_blocked: true,
        scatterers: Vec::new(),
        sm_gain_db: cfg.geometry.sm_gain_db,
    };
    let mut rng = derive_rng(cfg.seeds.master, &[stream::CODEBOOK]);
    ChannelSet::generate(&geometry, &cfg.ofdm, &mut rng)
}
