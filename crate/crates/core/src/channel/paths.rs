use std::f64::consts::PI;

use rand::Rng;

use super::geometry::{friis_gain, unit, ScenarioGeometry};
use super::Vec3;
use crate::{Error, Result, C64, SPEED_OF_LIGHT};

/// One propagation ray.
///
/// `aod` is the unit direction in which the ray leaves the transmitting
/// array; `aoa` is the unit propagation direction at the receiving array.
/// `complex_gain` already contains the carrier phase `exp(-j2π f_c τ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathComponent {
    pub complex_gain: C64,
    pub delay: f64,
    pub aod: Vec3,
    pub aoa: Vec3,
}

/// Ray lists of the four links of an RIS scenario.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinkPaths {
    /// Tx → Rx without touching the RIS (LoS plus scatterers).
    pub direct: Vec<PathComponent>,
    /// Tx → rRIS.
    pub tx_ris: Vec<PathComponent>,
    /// tRIS → Rx.
    pub ris_rx: Vec<PathComponent>,
    /// Tx → RIS plate → Rx (structural mode).
    pub sm: Vec<PathComponent>,
}

fn segment(a: Vec3, b: Vec3) -> Result<(f64, Vec3)> {
    let d = (b - a).norm();
    if !(d > 0.0) {
        return Err(Error::invalid(format!(
            "degenerate geometry: zero-length segment at ({:.3}, {:.3}, {:.3})",
            a.x, a.y, a.z
        )));
    }
    Ok((d, unit(b - a)?))
}

fn los_ray(from: Vec3, to: Vec3, freq: f64) -> Result<PathComponent> {
    let (d, dir) = segment(from, to)?;
    let tau = d / SPEED_OF_LIGHT;
    Ok(PathComponent {
        complex_gain: C64::from_polar(friis_gain(d, freq)?, -2.0 * PI * freq * tau),
        delay: tau,
        aod: dir,
        aoa: dir,
    })
}

/// Specular bounce off a point: amplitude `reflection * λ / (4π (d1 + d2))`.
fn bounce_ray(from: Vec3, via: Vec3, to: Vec3, reflection: C64, freq: f64) -> Result<PathComponent> {
    let (d1, dep) = segment(from, via)?;
    let (d2, arr) = segment(via, to)?;
    let tau = (d1 + d2) / SPEED_OF_LIGHT;
    Ok(PathComponent {
        complex_gain: reflection * C64::from_polar(friis_gain(d1 + d2, freq)?, -2.0 * PI * freq * tau),
        delay: tau,
        aod: dep,
        aoa: arr,
    })
}

/// Builds the rays of every link.
///
/// Each scatterer contributes one ray per link with a random reflection
/// phase drawn from `rng`; the draws happen in a fixed order (direct,
/// Tx→RIS, RIS→Rx; scatterers in list order) so a seed reproduces the same
/// rays. The structural mode is one ray bouncing off the centre of the RIS
/// plate with amplitude `10^(sm_gain_db/20)` and a metallic sign flip.
pub fn generate_paths<R: Rng + ?Sized>(scenario: &ScenarioGeometry, rng: &mut R) -> Result<LinkPaths> {
    scenario.validate()?;
    let freq = scenario.tx.carrier_freq;
    let tx = scenario.tx.reference();
    let rx = scenario.rx.reference();
    let rr = scenario.ris_r.reference();
    let rt = scenario.ris_t.reference();

    let mut scatter_link = |from: Vec3, to: Vec3| -> Result<Vec<PathComponent>> {
        scenario
            .scatterers
            .iter()
            .map(|s| {
                let phase = rng.random_range(0.0..2.0 * PI);
                let refl = C64::from_polar(10f64.powf(s.reflection_db / 20.0), phase);
                bounce_ray(from, s.pos(), to, refl, freq)
            })
            .collect()
    };

    let mut direct = Vec::new();
    if !scenario.los_blocked {
        direct.push(los_ray(tx, rx, freq)?);
    }
    direct.extend(scatter_link(tx, rx)?);

    let mut tx_ris = vec![los_ray(tx, rr, freq)?];
    tx_ris.extend(scatter_link(tx, rr)?);

    let mut ris_rx = vec![los_ray(rt, rx, freq)?];
    ris_rx.extend(scatter_link(rt, rx)?);

    let plate = scenario.ris_r.centroid();
    let sm_refl = C64::new(-(10f64.powf(scenario.sm_gain_db / 20.0)), 0.0);
    let sm = vec![bounce_ray(tx, plate, rx, sm_refl, freq)?];

    Ok(LinkPaths {
        direct,
        tx_ris,
        ris_rx,
        sm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{ArrayGeometry, Scatterer};
    use crate::seed::rng_from_seed;
    use approx::assert_relative_eq;

    const F: f64 = 3.5e9;

    fn single(p: Vec3) -> ArrayGeometry {
        ArrayGeometry::new(vec![p], F, Vec3::y()).unwrap()
    }

    fn scenario(los_blocked: bool, scatterers: Vec<Scatterer>) -> ScenarioGeometry {
        ScenarioGeometry {
            tx: single(Vec3::new(-2.0, 1.0, 0.0)),
            rx: single(Vec3::new(1.0, 1.0, 0.0)),
            ris_r: single(Vec3::zeros()),
            ris_t: single(Vec3::new(0.0, 0.0, 0.02)),
            los_blocked,
            scatterers,
            sm_gain_db: -6.0,
        }
    }

    #[test]
    fn free_space_direct_link_is_one_ray() {
        let p = generate_paths(&scenario(false, vec![]), &mut rng_from_seed(1)).unwrap();
        assert_eq!(p.direct.len(), 1);
        assert_eq!(p.tx_ris.len(), 1);
        assert_eq!(p.ris_rx.len(), 1);
        assert_eq!(p.sm.len(), 1);
        assert_relative_eq!(p.direct[0].delay, 3.0 / SPEED_OF_LIGHT, epsilon = 1e-20);
        assert_relative_eq!(
            p.direct[0].complex_gain.norm(),
            friis_gain(3.0, F).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn three_meter_segment_is_ten_ns() {
        let p = generate_paths(&scenario(false, vec![]), &mut rng_from_seed(1)).unwrap();
        assert_relative_eq!(p.direct[0].delay, 10.007e-9, max_relative = 1e-4);
    }

    #[test]
    fn blocked_los_without_scatterers_is_empty() {
        let p = generate_paths(&scenario(true, vec![]), &mut rng_from_seed(1)).unwrap();
        assert!(p.direct.is_empty());
    }

    #[test]
    fn scatterer_rays_per_link() {
        let s = vec![
            Scatterer {
                position: [0.0, 3.0, 0.0],
                reflection_db: -10.0,
            },
            Scatterer {
                position: [-1.0, -2.0, 1.0],
                reflection_db: -10.0,
            },
        ];
        let p = generate_paths(&scenario(true, s.clone()), &mut rng_from_seed(5)).unwrap();
        assert_eq!(p.direct.len(), 2);
        assert_eq!(p.tx_ris.len(), 3);
        assert_eq!(p.ris_rx.len(), 3);
        // tx (-2,1,0) -> (0,3,0) -> rx (1,1,0)
        let d = (8f64).sqrt() + (5f64).sqrt();
        assert_relative_eq!(
            p.direct[0].complex_gain.norm(),
            10f64.powf(-0.5) * friis_gain(d, F).unwrap(),
            max_relative = 1e-12
        );
        assert_relative_eq!(p.direct[0].delay, d / SPEED_OF_LIGHT, max_relative = 1e-12);
        let again = generate_paths(&scenario(true, s), &mut rng_from_seed(5)).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn scatterer_on_an_array_is_degenerate() {
        let s = vec![Scatterer {
            position: [1.0, 1.0, 0.0],
            reflection_db: -10.0,
        }];
        assert!(matches!(
            generate_paths(&scenario(true, s), &mut rng_from_seed(1)),
            Err(Error::InvalidArgument(_))
        ));
    }
}
